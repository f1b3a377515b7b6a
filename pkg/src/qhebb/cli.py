"""Command-line experiment runner.

Exit codes: 0 success, 1 contract violation, 2 input error, 3 precision unreachable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .circuit import compile_unitary, from_text, gate_count, to_text
from .cpswap import (CPSwapSpec, ancilla_input_isometry, build_cpswap_circuit, count_report, exact_cpswap,
                     verify_cpswap)
from .files import InputError, batch_to_doc, load_batch, load_patterns, parse_state_spec
from .gateset import GateErrorVector
from .hebbian import build_weight_matrix, encode_batch, quantum_hebbian_identity_check
from .phasest import kitaev_phase_estimate, pe_resource_report
from .protocol import (ErrorModelParams, ProtocolParams, ResourceConfig, SwapMode, alpha_fit, ensemble_state,
                       error_model, protocol_errors, resource_report)
from .qcore import DimensionError, kron, phase_invariant_distance
from .rzsynth import DEFAULT_MAX_T, CountModel, PrecisionUnreachable, count_model_g, rz_matrix, synthesize_rz

EXIT_OK, EXIT_CONTRACT, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3
# compiling and checking a cpswap circuit is cheap up to this many qubits
VERIFY_QUBIT_LIMIT = 10


@dataclass
class ExperimentConfig:
    command: str
    seed: int = 0
    output_path: str | None = None
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)


# --------------------------------------------------------------------------------------
# output helpers


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "as_tuple"):
        return list(o.as_tuple())
    raise TypeError(f"cannot serialize {type(o).__name__}")


def csv_text(cfg: ExperimentConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config: {cfg.to_json()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _float_list(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse number list {s!r}") from exc


def _int_list(s: str) -> list[int]:
    try:
        return [int(v) for v in s.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse integer list {s!r}") from exc


# --------------------------------------------------------------------------------------
# subcommands


def cmd_synth(cfg: ExperimentConfig) -> int:
    p = cfg.params
    r = synthesize_rz(p["tau"], p["eta"], max_t=p["max_t"])
    _emit(_json({"tau": p["tau"], "eta": p["eta"], "tokens": r.tokens(), "achieved_error": r.achieved_error,
                 "counts": r.counts, "t_count": r.counts.t}), cfg.output_path)
    return EXIT_OK


def cmd_decompose(cfg: ExperimentConfig) -> int:
    p = cfg.params
    spec = CPSwapSpec(p["n"], p["theta"], p["eta"])
    cc = build_cpswap_circuit(spec, max_t=p["max_t"])
    rep = count_report(cc)
    report = {
        "n": spec.n, "theta": spec.theta, "eta": spec.synthesis_eta,
        "formula_counts": rep["formula_counts"], "actual_counts": rep["actual_counts"],
        "structural_counts": rep["structural_counts"], "g_eta_effective": rep["g_eta_effective"],
        "rotation_counts": rep["rotation_counts"], "rotation_discrepancy": rep["rotation_discrepancy"],
        "error_bound": cc.error_bound, "verified_error": None,
    }
    if spec.total_qubits <= VERIFY_QUBIT_LIMIT:
        v = verify_cpswap(cc)
        report.update(verified_error=v["distance"], ancilla_leakage=v["ancilla_leakage"],
                      control0_deviation=v["control0_deviation"])
    if p.get("circuit_out"):
        Path(p["circuit_out"]).write_text(to_text(cc.circuit))
    _emit(_json(report), cfg.output_path)
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig) -> int:
    p = cfg.params
    try:
        text = Path(p["circuit"]).read_text()
    except OSError as exc:
        raise InputError(f"circuit: cannot read {p['circuit']} ({exc.strerror})") from exc
    try:
        c = from_text(text)
    except (ValueError, IndexError) as exc:
        raise InputError(f"circuit: {exc}") from exc
    if c.num_qubits > 12:
        raise InputError(f"circuit: {c.num_qubits} qubits exceed the verification cap of 12")
    u = compile_unitary(c)
    out = {"num_qubits": c.num_qubits, "label": c.label, "gate_count": gate_count(c),
           "unitarity_deviation": float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))}
    dist = None
    if p.get("tau") is not None:
        if c.num_qubits != 1:
            raise InputError("circuit: --tau needs a single-qubit circuit")
        dist = phase_invariant_distance(u, rz_matrix(p["tau"]))
        out["target"] = f"exp(-i {p['tau']} Z)"
    elif p.get("cpswap_n") is not None:
        spec = CPSwapSpec(p["cpswap_n"], p["theta"])
        if c.num_qubits != spec.total_qubits:
            raise InputError(f"circuit: expected {spec.total_qubits} qubits for N={spec.n}, got {c.num_qubits}")
        iso = ancilla_input_isometry(c.num_qubits)
        dist = phase_invariant_distance(u @ iso, kron(exact_cpswap(spec), np.array([[1.0], [0.0]])))
        out["target"] = f"cpswap N={spec.n} theta={spec.theta}"
    out["distance"] = dist
    ok = dist is None or p.get("tol") is None or dist <= p["tol"]
    out["pass"] = ok
    _emit(_json(out), cfg.output_path)
    return EXIT_OK if ok else EXIT_CONTRACT


def _sweep_point(args):
    batch, t, n, mode, eta = args
    return protocol_errors(batch, ProtocolParams(t, n, mode, eta))


def _run_points(points, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, points))
    return [_sweep_point(a) for a in points]


def cmd_bcqse_sweep(cfg: ExperimentConfig) -> int:
    p = cfg.params
    batch = load_batch(p["batch"])
    mode = SwapMode(p["mode"])
    ns = _int_list(p["n_list"])
    if not ns or min(ns) < 1:
        raise InputError("n-list: need positive integers")
    t = p["t"]
    errs = _run_points([(batch, t, n, mode, p["eta"]) for n in ns], p["workers"])
    alpha = p.get("alpha")
    if alpha is None:
        alpha = alpha_fit([(t, n, e["choi_distance"]) for n, e in zip(ns, errs)])
    compiled = mode is SwapMode.COMPILED
    model = ErrorModelParams(
        alpha=max(alpha, 1e-300), gate_errors=GateErrorVector.uniform(p["gate_error"]),
        eta=p["eta"] if compiled else 0.0, M=batch.M, N=batch.N,
        g_eta=count_model_g(p["eta"]) if compiled else 0)
    rows = [(n, e["choi_distance"], e["op_distance_proxy"], error_model(model, t, n)) for n, e in zip(ns, errs)]
    cfg.params["alpha_used"] = alpha
    _emit(csv_text(cfg, ["n", "choi_distance", "op_distance_proxy", "predicted_error_model"], rows), cfg.output_path)
    return EXIT_OK


def cmd_alpha_fit(cfg: ExperimentConfig) -> int:
    p = cfg.params
    batch = load_batch(p["batch"])
    ts, ns = _float_list(p["t_list"]), _int_list(p["n_list"])
    if not ts or not ns:
        raise InputError("t-list/n-list: must be non-empty")
    grid = [(t, n) for t in ts for n in ns]
    errs = _run_points([(batch, t, n, SwapMode(p["mode"]), p["eta"]) for t, n in grid], p["workers"])
    a_choi = alpha_fit([(t, n, e["choi_distance"]) for (t, n), e in zip(grid, errs)])
    a_op = alpha_fit([(t, n, e["op_distance_proxy"]) for (t, n), e in zip(grid, errs)])
    cfg.params.update(alpha_choi=a_choi, alpha_op=a_op)
    rows = [(t, n, e["choi_distance"], e["op_distance_proxy"]) for (t, n), e in zip(grid, errs)]
    _emit(csv_text(cfg, ["t", "n", "choi_distance", "op_distance_proxy"], rows), cfg.output_path)
    sys.stderr.write(f"alpha (choi) = {a_choi:.6g}, alpha (op proxy) = {a_op:.6g}\n")
    return EXIT_OK


def cmd_hebbian(cfg: ExperimentConfig) -> int:
    p = cfg.params
    pats = load_patterns(p["patterns"])
    w = build_weight_matrix(pats).w
    out_dir = Path(p["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [[f"w{j}" for j in range(pats.d)]] + [list(r) for r in w]
    (out_dir / "weights.csv").write_text(csv_text(cfg, rows[0], rows[1:]))
    batch = encode_batch(pats)
    (out_dir / "batch.json").write_text(json.dumps(batch_to_doc(batch), indent=1) + "\n")
    report = {"d": pats.d, "M": pats.M, "strict": pats.strict,
              "identity_residual": quantum_hebbian_identity_check(pats),
              "symmetric": bool(np.allclose(w, w.T, atol=0, rtol=0)),
              "zero_diagonal": bool(np.all(np.diag(w) == 0)),
              "weights_csv": str(out_dir / "weights.csv"), "batch_file": str(out_dir / "batch.json")}
    _emit(_json(report), cfg.output_path)
    return EXIT_OK


def cmd_phase_estimate(cfg: ExperimentConfig) -> int:
    p = cfg.params
    batch = load_batch(p["batch"])
    psi = parse_state_spec(p["input"], batch)
    params = ProtocolParams(np.pi, p["n"], SwapMode(p["mode"]), p["eta"])
    r = kitaev_phase_estimate(batch, psi, p["bits"], params, shots=p.get("shots"), seed=cfg.seed,
                              exact_channel=p["exact_channel"])
    out = {"estimate": r.estimated_eigenvalue, "bits": r.precision_bits,
           "per_bit_probs": [{"p_plus_x": a, "p_plus_y": b} for a, b in r.success_probability_trace],
           "input_overlap": r.input_overlap, "channel_errors": r.channel_errors, "warnings": r.warnings,
           "spectrum": sorted(np.linalg.eigvalsh(ensemble_state(batch)).round(12).tolist(), reverse=True),
           "resources": pe_resource_report(2.0 ** -p["bits"], batch.M, batch.N)}
    if r.samples is not None:
        vals, counts = np.unique(np.round(r.samples, 12), return_counts=True)
        out["histogram"] = {repr(float(v)): int(c) for v, c in zip(vals, counts)}
    _emit(_json(out), cfg.output_path)
    return EXIT_OK


def cmd_resources(cfg: ExperimentConfig) -> int:
    p = cfg.params
    conf = ResourceConfig(alpha=p["alpha"], gate_errors=GateErrorVector.uniform(p["gate_error"]), eta=p["eta"],
                          count_model=CountModel(p["c_log"], p["g_const"]), delta1=p["delta1"],
                          delta2=p["delta2"], C=p["C"], t_data=p.get("t_data"))
    rep = resource_report(p["n_qubits"], p["m"], p["t"], epsilon=p.get("epsilon"), regime=p["regime"], config=conf)
    _emit(_json(rep), cfg.output_path)
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth, "decompose": cmd_decompose, "verify": cmd_verify, "bcqse-sweep": cmd_bcqse_sweep,
    "alpha-fit": cmd_alpha_fit, "hebbian": cmd_hebbian, "phase-estimate": cmd_phase_estimate,
    "resources": cmd_resources,
}


def run(cfg: ExperimentConfig) -> int:
    """Dispatch one experiment; returns the process exit status."""
    np.random.seed(cfg.seed)
    try:
        return COMMANDS[cfg.command](cfg)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except PrecisionUnreachable as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECISION
    except (ValueError, DimensionError, IndexError) as exc:
        sys.stderr.write(f"contract violation: {exc}\n")
        return EXIT_CONTRACT


# --------------------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhebb", description="bcQSE simulation and Clifford+T compilation toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", dest="output_path", default=None, help="output file (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="Clifford+T approximation of exp(-i tau Z)")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--max-t", type=int, default=DEFAULT_MAX_T)

    s = sub.add_parser("decompose", parents=[common], help="build and check the controlled partial swap circuit")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--eta", type=float, default=1e-3)
    s.add_argument("--max-t", type=int, default=DEFAULT_MAX_T)
    s.add_argument("--circuit-out", default=None, help="write the circuit text file here")

    s = sub.add_parser("verify", parents=[common], help="compile a circuit file and compare to a target")
    s.add_argument("--circuit", required=True)
    s.add_argument("--tau", type=float, default=None, help="target exp(-i tau Z)")
    s.add_argument("--cpswap-n", type=int, default=None, help="target cpswap on N-qubit registers")
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--tol", type=float, default=None, help="exit 1 if the distance exceeds this")

    for name, hlp in (("bcqse-sweep", "channel error versus n"), ("alpha-fit", "fit alpha in error*n = alpha t^2")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--batch", required=True)
        s.add_argument("--n-list", required=True)
        s.add_argument("--mode", choices=[m.value for m in SwapMode] + ["ideal", "compiled"], default="ideal")
        s.add_argument("--eta", type=float, default=1e-3)
        s.add_argument("--workers", type=int, default=1)
        if name == "bcqse-sweep":
            s.add_argument("--t", type=float, required=True)
            s.add_argument("--alpha", type=float, default=None, help="model alpha (default: fitted)")
            s.add_argument("--gate-error", type=float, default=0.0)
        else:
            s.add_argument("--t-list", required=True)

    s = sub.add_parser("hebbian", parents=[common], help="weight matrix, identity residual, encoded batch")
    s.add_argument("--patterns", required=True)
    s.add_argument("--out-dir", default=".")

    s = sub.add_parser("phase-estimate", parents=[common], help="Kitaev phase estimation of rho's eigenvalues")
    s.add_argument("--batch", required=True)
    s.add_argument("--input", required=True, help="basis:i | eig:i | amps:a0,a1,... | JSON file")
    s.add_argument("--bits", type=int, required=True)
    s.add_argument("--shots", type=int, default=None)
    s.add_argument("--n", type=int, default=4, help="batches for the lowest power (scaled by 4^k)")
    s.add_argument("--mode", choices=[m.value for m in SwapMode] + ["ideal", "compiled"], default="ideal")
    s.add_argument("--eta", type=float, default=1e-3)
    s.add_argument("--exact-channel", action="store_true", help="use the exact target channel")

    s = sub.add_parser("resources", parents=[common], help="qubit and gate resource report")
    s.add_argument("--regime", choices=["fixed", "error_corrected"], default="fixed")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n-qubits", type=int, required=True)
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--gate-error", type=float, default=1e-6)
    s.add_argument("--eta", type=float, default=1e-3)
    s.add_argument("--c-log", type=float, default=3.0)
    s.add_argument("--g-const", type=float, default=10.0)
    s.add_argument("--delta1", type=float, default=0.1)
    s.add_argument("--delta2", type=float, default=0.1)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--t-data", type=float, default=None)
    return ap


_MODE_ALIASES = {"ideal": SwapMode.IDEAL.value, "compiled": SwapMode.COMPILED.value}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "seed", "output_path")}
    if "mode" in params:
        params["mode"] = _MODE_ALIASES.get(params["mode"], params["mode"])
    return ExperimentConfig(ns.command, ns.seed, ns.output_path, params)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
