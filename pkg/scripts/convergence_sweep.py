"""Protocol error against the number of batches and the evolution time.

Writes one CSV row per (t, n) with both distance proxies, then prints the fitted
log-log slopes and alpha.
"""

import argparse
import csv
import math
import sys

import numpy as np

from qhebb.protocol import ProtocolParams, TrainingBatch, alpha_fit, protocol_errors


def default_batch() -> TrainingBatch:
    r2 = 1 / math.sqrt(2)
    return TrainingBatch.of(np.array([1.0, 0.0]), np.array([r2, r2]), np.array([r2, -1j * r2]))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-list", default="0.25,0.5,1,2")
    ap.add_argument("--n-list", default="4,8,16,32,64")
    ap.add_argument("--out", default="convergence.csv")
    args = ap.parse_args(argv)
    ts = [float(x) for x in args.t_list.split(",")]
    ns = [int(x) for x in args.n_list.split(",")]
    batch = default_batch()

    rows = []
    for t in ts:
        for n in ns:
            e = protocol_errors(batch, ProtocolParams(t, n))
            rows.append((t, n, e["choi_distance"], e["op_distance_proxy"]))
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "n", "choi_distance", "op_distance_proxy"])
        w.writerows(rows)

    arr = np.array(rows)
    t_mid = ts[len(ts) // 2]
    sel = arr[arr[:, 0] == t_mid]
    slope_n = np.polyfit(np.log(sel[:, 1]), np.log(sel[:, 2]), 1)[0]
    sel = arr[arr[:, 1] == ns[-1]]
    slope_t = np.polyfit(np.log(sel[:, 0]), np.log(sel[:, 2]), 1)[0]
    print(f"slope vs n at t={t_mid}: {slope_n:.3f}", file=sys.stderr)
    print(f"slope vs t at n={ns[-1]}: {slope_t:.3f}", file=sys.stderr)
    print(f"alpha (Choi proxy): {alpha_fit([(t, n, e) for t, n, e, _ in rows]):.4f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
