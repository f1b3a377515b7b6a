"""Dense linear algebra and channel plumbing.

Conventions used throughout the package:

* qubit 0 is the most significant bit of a basis index (big-endian);
* a Choi matrix is ``J = sum_ij |i><j| (x) Phi(|i><j|)`` with the input factor first,
  so trace preservation reads ``Tr_out J = I_in``;
* superoperators act on row-major vectorised operators, ``vec(A X B) = (A (x) B^T) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

UNITARY_TOL = 1e-12
CPTP_TOL = 1e-10


class DimensionError(ValueError):
    pass


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors), left to right."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, mats)


def num_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def basis_state(index: int, num_qubits: int) -> np.ndarray:
    v = np.zeros(1 << num_qubits, dtype=complex)
    v[index] = 1.0
    return v


def projector(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def swap_operator(n: int) -> np.ndarray:
    """Operator exchanging two n-qubit registers (first n qubits <-> last n qubits)."""
    if n <= 0:
        raise ValueError("swap_operator needs n >= 1")
    d = 1 << n
    idx = np.arange(d * d)
    hi, lo = np.divmod(idx, d)
    out = np.zeros((d * d, d * d), dtype=complex)
    out[lo * d + hi, idx] = 1.0
    return out


def is_hermitian(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=tol, rtol=0)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return op_norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def matrix_exp_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Return ``exp(-i t h)`` for Hermitian ``h`` via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol=1e-10):
        raise ValueError("matrix_exp_hermitian requires a Hermitian matrix")
    h = (h + h.conj().T) / 2
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T


def partial_trace(m: np.ndarray, keep, total_qubits: int) -> np.ndarray:
    """Reduced operator on the qubits in ``keep`` (returned in ascending qubit order)."""
    m = np.asarray(m, dtype=complex)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= total_qubits for k in keep):
        raise IndexError(f"qubit index out of range for {total_qubits} qubits: {keep}")
    if m.shape != (1 << total_qubits, 1 << total_qubits):
        raise DimensionError(f"matrix of shape {m.shape} is not over {total_qubits} qubits")
    drop = [q for q in range(total_qubits) if q not in keep]
    t = m.reshape([2] * (2 * total_qubits))
    # trace out from the highest index down so earlier axis numbers stay valid
    n = total_qubits
    for q in reversed(drop):
        t = np.trace(t, axis1=q, axis2=q + n)
        n -= 1
    dk = 1 << len(keep)
    return t.reshape(dk, dk)


def op_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def trace_norm(m: np.ndarray) -> float:
    m = np.asarray(m)
    if is_hermitian(m, tol=1e-9):
        return float(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def phase_invariant_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min_phi ||u - e^{i phi} v||_op``.

    For unitaries this is ``2 sin(L/4)`` where ``L`` is the shortest arc holding all
    eigenphases of ``v^dag u``; for 2x2 that equals ``sqrt(2 - |Tr(u^dag v)|)``, but the
    trace form loses half the digits to cancellation near zero, so the arc form is used.
    Non-square inputs (isometries) are handled by a bounded scalar search.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch {u.shape} vs {v.shape}")
    if u.shape[0] == u.shape[1] and is_unitary(u, 1e-9) and is_unitary(v, 1e-9):
        phases = np.sort(np.angle(np.linalg.eigvals(v.conj().T @ u)))
        gaps = np.diff(np.concatenate([phases, phases[:1] + 2 * np.pi]))
        arc = 2 * np.pi - gaps.max()
        return float(2 * np.sin(arc / 4))
    return _phase_search(u, v)


def _phase_search(u: np.ndarray, v: np.ndarray) -> float:
    from scipy.optimize import minimize_scalar

    # a good starting phase is the argument of <v, u>_HS
    phi0 = np.angle(np.vdot(v, u))

    def f(phi):
        return op_norm(u - np.exp(1j * phi) * v)

    grid = phi0 + np.linspace(-np.pi, np.pi, 33)
    best = min(grid, key=f)
    res = minimize_scalar(f, bounds=(best - np.pi / 16, best + np.pi / 16), method="bounded",
                          options={"xatol": 1e-13})
    return float(min(res.fun, f(best)))


# --------------------------------------------------------------------------------------
# states


def check_state(psi: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    num_qubits_of(psi.size)
    if abs(np.vdot(psi, psi).real - 1.0) > tol:
        raise ValueError(f"state is not normalised (norm^2 = {np.vdot(psi, psi).real:.15g})")
    return psi


def check_density(rho: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError("density matrix must be square")
    num_qubits_of(rho.shape[0])
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def random_state(num_qubits: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return v / np.linalg.norm(v)


def random_density(num_qubits: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    d = 1 << num_qubits
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# --------------------------------------------------------------------------------------
# channels


def _superop_to_choi(s: np.ndarray, din: int, dout: int) -> np.ndarray:
    return s.reshape(dout, dout, din, din).transpose(2, 0, 3, 1).reshape(din * dout, din * dout)


def _choi_to_superop(j: np.ndarray, din: int, dout: int) -> np.ndarray:
    return j.reshape(din, dout, din, dout).transpose(1, 3, 0, 2).reshape(dout * dout, din * din)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A channel held as its Choi matrix.

    The superoperator is cached alongside since composition works on it.
    """

    in_qubits: int
    out_qubits: int
    choi: np.ndarray

    def __post_init__(self):
        d = 1 << (self.in_qubits + self.out_qubits)
        if self.choi.shape != (d, d):
            raise DimensionError(
                f"Choi matrix shape {self.choi.shape} does not match {self.in_qubits}->{self.out_qubits} qubits")
        self.choi.setflags(write=False)

    @property
    def din(self) -> int:
        return 1 << self.in_qubits

    @property
    def dout(self) -> int:
        return 1 << self.out_qubits

    @classmethod
    def from_superop(cls, s: np.ndarray, in_qubits: int, out_qubits: int) -> "QuantumChannel":
        ch = cls(in_qubits, out_qubits, _superop_to_choi(np.asarray(s, dtype=complex), 1 << in_qubits, 1 << out_qubits))
        object.__setattr__(ch, "_superop", np.asarray(s, dtype=complex))
        return ch

    @classmethod
    def from_kraus(cls, kraus, in_qubits: int, out_qubits: int | None = None) -> "QuantumChannel":
        out_qubits = in_qubits if out_qubits is None else out_qubits
        s = sum(np.kron(k, k.conj()) for k in kraus)
        return cls.from_superop(s, in_qubits, out_qubits)

    @property
    def superop(self) -> np.ndarray:
        s = getattr(self, "_superop", None)
        if s is None:
            s = _choi_to_superop(self.choi, self.din, self.dout)
            object.__setattr__(self, "_superop", s)
        return s

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.superop @ rho.reshape(-1)).reshape(self.dout, self.dout)

    def min_choi_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.choi + self.choi.conj().T) / 2).min())

    def tp_deviation(self) -> float:
        red = partial_trace(self.choi, range(self.in_qubits), self.in_qubits + self.out_qubits)
        return op_norm(red - np.eye(self.din))

    def is_cptp(self, tol: float = CPTP_TOL) -> bool:
        return self.min_choi_eigenvalue() >= -tol and self.tp_deviation() <= tol

    def power(self, n: int) -> "QuantumChannel":
        if self.in_qubits != self.out_qubits:
            raise DimensionError("only endomorphic channels can be iterated")
        return QuantumChannel.from_superop(np.linalg.matrix_power(self.superop, n), self.in_qubits, self.out_qubits)


def channel_from_unitary(u: np.ndarray) -> QuantumChannel:
    u = np.asarray(u, dtype=complex)
    n = num_qubits_of(u.shape[0])
    return QuantumChannel.from_superop(np.kron(u, u.conj()), n, n)


def identity_channel(num_qubits: int) -> QuantumChannel:
    return channel_from_unitary(np.eye(1 << num_qubits))


def channel_compose(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    """``a o b``: apply ``b`` first, then ``a``."""
    if b.out_qubits != a.in_qubits:
        raise DimensionError(f"cannot feed {b.out_qubits} qubits into a {a.in_qubits}-qubit channel")
    return QuantumChannel.from_superop(a.superop @ b.superop, b.in_qubits, a.out_qubits)


def channel_distance(a: QuantumChannel, b: QuantumChannel) -> float:
    """Half the trace norm of the Choi difference, divided by the input dimension."""
    if (a.in_qubits, a.out_qubits) != (b.in_qubits, b.out_qubits):
        raise DimensionError("channel_distance needs channels of equal shape")
    return 0.5 * trace_norm(a.choi - b.choi) / a.din


def superop_distance(a: QuantumChannel, b: QuantumChannel) -> float:
    """Operator norm of the Liouville-representation difference (the Hilbert-Schmidt induced norm)."""
    if (a.in_qubits, a.out_qubits) != (b.in_qubits, b.out_qubits):
        raise DimensionError("superop_distance needs channels of equal shape")
    return op_norm(a.superop - b.superop)


def embed_operator(op: np.ndarray, targets, num_qubits: int) -> np.ndarray:
    """Full ``2^num_qubits`` matrix of ``op`` acting on ``targets`` (in the given order)."""
    op = np.asarray(op, dtype=complex)
    targets = list(targets)
    k = len(targets)
    if op.shape != (1 << k, 1 << k):
        raise DimensionError(f"operator shape {op.shape} does not match {k} targets")
    eye = np.eye(1 << num_qubits, dtype=complex)
    return apply_operator_to_columns(op, targets, num_qubits, eye)


def apply_operator_to_columns(op: np.ndarray, targets, num_qubits: int, mat: np.ndarray) -> np.ndarray:
    """Left-multiply ``mat`` (shape ``(2^n, m)`` or ``(2^n,)``) by ``op`` placed on ``targets``."""
    targets = list(targets)
    k = len(targets)
    vec = mat.ndim == 1
    cols = 1 if vec else mat.shape[1]
    t = mat.reshape([2] * num_qubits + [cols])
    rest = [q for q in range(num_qubits) if q not in targets]
    perm = targets + rest + [num_qubits]
    t = t.transpose(perm).reshape(1 << k, -1)
    t = op @ t
    t = t.reshape([2] * num_qubits + [cols])
    t = t.transpose(np.argsort(perm))
    out = t.reshape(1 << num_qubits, cols)
    return out.ravel() if vec else out
