"""T-count of the rotation synthesizer against target precision.

Random angles are drawn from a seeded generator; one CSV row per (eta, angle).
"""

import argparse
import csv
import sys

import numpy as np

from qhebb.rzsynth import PrecisionUnreachable, synthesize_rz


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta-list", default="1e-1,3e-2,1e-2,3e-3,1e-3")
    ap.add_argument("--angles", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="synthesis.csv")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    taus = rng.uniform(0, np.pi, args.angles)
    rows = []
    for eta in (float(x) for x in args.eta_list.split(",")):
        for tau in taus:
            try:
                r = synthesize_rz(float(tau), eta)
                rows.append((eta, float(tau), r.counts.t, len(r.sequence), r.achieved_error))
            except PrecisionUnreachable as e:
                rows.append((eta, float(tau), "", "", e.floor))
        med = np.median([r[2] for r in rows if r[0] == eta and r[2] != ""])
        print(f"eta={eta:g}: median T-count {med:g}", file=sys.stderr)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["eta", "tau", "t_count", "length", "error"])
        w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
