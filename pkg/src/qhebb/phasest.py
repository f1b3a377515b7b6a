"""Kitaev-style phase estimation driven by bcQSE channels.

The power-k channel approximates ``exp(-i t_k |1><1| (x) rho)`` with ``t_k = 2^k pi`` and
``n_k = n 4^k`` batches, which keeps the per-bit error fixed.  With the learning qubit
in |+> and an eigenvector of rho (eigenvalue lam) in the processing register, the learning
qubit picks up ``exp(-i t_k lam)``, so bit k reads ``frac(2^k x)`` with ``x = lam / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import QuantumChannel, channel_distance, check_state, partial_trace, projector
from .protocol import ProtocolParams, TrainingBatch, ensemble_state, run_bcqse, target_channel

T0 = math.pi
_PLUS = np.array([1.0, 1.0]) / math.sqrt(2)
_MINUS = np.array([1.0, -1.0]) / math.sqrt(2)
# below this learning-qubit coherence a bit is no better than a coin flip
_CONTRAST_FLOOR = 0.5


@dataclass(frozen=True)
class PhaseEstimateResult:
    estimated_eigenvalue: float
    precision_bits: int
    success_probability_trace: list = field(default_factory=list)  # per power: (P(+), P(+i)) of the learning qubit
    input_overlap: float = 1.0  # largest |<v_i|psi>|^2 over eigenvectors of rho
    warnings: list = field(default_factory=list)
    samples: list | None = None  # per-shot estimates in shot mode
    channel_errors: list = field(default_factory=list)


def _power_channels(batch: TrainingBatch, bits: int, params: ProtocolParams, exact_channel: bool):
    """Channels for t_k = 2^k pi, k = 0..bits.  ``params.t`` is ignored; n, mode and eta are used."""
    chans = []
    # lam = 2x, so bits + 1 binary digits of x give lam to 2^-bits
    for k in range(bits + 1):
        tk = (2 ** k) * T0
        if exact_channel:
            chans.append(target_channel(batch, tk))
        else:
            pk = ProtocolParams(tk, params.n * 4 ** k, params.mode, params.synthesis_eta)
            chans.append(run_bcqse(batch, pk))
    return chans


def _learning_state(ch: QuantumChannel, rho_proc: np.ndarray, nproc: int) -> tuple[np.ndarray, np.ndarray]:
    rho = np.kron(projector(_PLUS), rho_proc)
    out = ch.apply(rho)
    return out, partial_trace(out, [0], 1 + nproc)


def _wrap_eigenvalue(x: float) -> float:
    """Map a fraction x in [0, 1) to lam = 2x, folding the negative branch back to 0."""
    lam = 2.0 * (x % 1.0)
    if lam > 1.5:
        lam -= 2.0
    return float(min(max(lam, 0.0), 1.0))


def _kitaev_combine(fracs: list[float]) -> float:
    """Combine per-power fractions ``f_k ~ frac(2^k x)`` from the top bit down."""
    beta = fracs[-1] % 1.0
    for f in reversed(fracs[:-1]):
        cands = (beta / 2, (beta + 1) / 2)
        beta = min(cands, key=lambda c: abs(((c - f + 0.5) % 1.0) - 0.5))
    return beta


def _overlaps(batch: TrainingBatch, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    evals, evecs = np.linalg.eigh(ensemble_state(batch))
    return evals, evecs, np.abs(evecs.conj().T @ psi) ** 2


def ipea_shot(channels, psi: np.ndarray, rng: np.random.Generator) -> tuple[float, np.ndarray]:
    """One iterative phase-estimation run with feedback; returns (eigenvalue, final processing state).

    The learning qubit carries ``exp(2 pi i 2^k y)`` with ``y = frac(-x)``; bits of y are read
    from the least significant up, each corrected by the already known lower bits.
    """
    m = len(channels)
    nproc = channels[0].in_qubits - 1
    rho_proc = projector(psi)
    ybits = [0] * m  # ybits[j] is the (j+1)-th binary digit of y
    for k in reversed(range(m)):
        out = channels[k].apply(np.kron(projector(_PLUS), rho_proc))
        omega = 2 * math.pi * sum(ybits[j] / 2 ** (j - k + 1) for j in range(k + 1, m))
        corr = np.kron(np.diag([1.0, np.exp(-1j * omega)]), np.eye(1 << nproc))
        out = corr @ out @ corr.conj().T
        branches = []
        for v in (_PLUS, _MINUS):
            p = np.kron(projector(v), np.eye(1 << nproc))
            post = p @ out @ p
            branches.append((max(float(np.trace(post).real), 0.0), post))
        probs = np.array([b[0] for b in branches])
        outcome = int(rng.choice(2, p=probs / probs.sum()))
        ybits[k] = outcome
        post = branches[outcome][1] / branches[outcome][0]
        rho_proc = partial_trace(post, list(range(1, 1 + nproc)), 1 + nproc)
    y = sum(b / 2 ** (j + 1) for j, b in enumerate(ybits))
    return _wrap_eigenvalue(-y), rho_proc


def kitaev_phase_estimate(batch: TrainingBatch, input_state, bits: int, params: ProtocolParams | None = None,
                          shots: int | None = None, seed: int = 0, exact_channel: bool = False) -> PhaseEstimateResult:
    """Estimate an eigenvalue of rho to ``bits`` bits.

    Without ``shots`` the learning-qubit expectations are evaluated exactly and combined
    Kitaev-style (this assumes ``input_state`` is close to one eigenvector).  With ``shots``
    each run is an independent iterative estimation with projective measurements, so a
    superposition input lands on eigenvalue i with probability ``|c_i|^2``.
    """
    if bits < 1:
        raise ValueError("need at least one bit of precision")
    params = params if params is not None else ProtocolParams(t=T0, n=1)
    psi = check_state(np.asarray(input_state, dtype=complex), tol=1e-10)
    if psi.size != 1 << batch.N:
        raise ValueError(f"input state of length {psi.size} does not match N={batch.N}")
    _, _, ov = _overlaps(batch, psi)
    chans = _power_channels(batch, bits, params, exact_channel)
    warnings = []
    errs = []
    if not exact_channel:
        errs = [channel_distance(c, target_channel(batch, (2 ** k) * T0)) for k, c in enumerate(chans)]

    trace, fracs = [], []
    rho_in = projector(psi)
    for k, ch in enumerate(chans):
        _, rl = _learning_state(ch, rho_in, batch.N)
        ex, ey = 2 * rl[0, 1].real, -2 * rl[0, 1].imag
        trace.append(((1 + ex) / 2, (1 + ey) / 2))
        # measured angle is -t_k lam; fraction f_k = frac(2^k x)
        fracs.append((-math.atan2(ey, ex) / (2 * math.pi)) % 1.0)
        if math.hypot(ex, ey) < _CONTRAST_FLOOR:
            warnings.append(f"bit {k}: learning-qubit contrast {math.hypot(ex, ey):.3f} is below "
                            f"{_CONTRAST_FLOOR}; precision beyond this bit is limited by channel error")
    if errs and max(errs) > 1 / 8:
        warnings.append(f"channel error {max(errs):.3g} exceeds 1/8; increase n for the requested bits")

    samples = None
    if shots is None:
        if ov.max() < 1 - 1e-6:
            warnings.append(f"input overlap {ov.max():.3f} < 1: expectation mode reports a mixed phase; use shots")
        lam = _wrap_eigenvalue(_kitaev_combine(fracs))
        lam = round(lam * 2 ** bits) / 2 ** bits
    else:
        if shots < 1:
            raise ValueError("shots must be positive")
        rng = np.random.default_rng(seed)
        samples = [ipea_shot(chans, psi, rng)[0] for _ in range(shots)]
        vals, counts = np.unique(np.round(samples, 12), return_counts=True)
        lam = float(vals[np.argmax(counts)])
    return PhaseEstimateResult(float(lam), bits, trace, float(ov.max()), warnings, samples, errs)


def pe_resource_report(epsilon: float, M: int, N: int, C1: float = 1.0, C2: float = 1.0) -> dict:
    """Asymptotic phase-estimation costs for target precision epsilon.

    ``unitary_applications = ceil(C1/eps)`` controlled exponentials, each built from
    ``n = ceil(C2/eps^2)`` batches.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    apps = math.ceil(C1 / epsilon)
    n = math.ceil(C2 / epsilon ** 2)
    total = apps * n
    work = total * M * N
    log = max(1.0, math.log2(work))
    return {
        "epsilon": epsilon,
        "unitary_applications": apps,
        "n_per_application": n,
        "total_batches": total,
        "data_states": total * M,
        "qubit_estimate": math.ceil(work * log),
        "gate_estimate": math.ceil(work * log),
        "learning_qubits": {"iterative": 1, "textbook": math.ceil(math.log2(apps)) + 1},
    }
