"""Clifford+T approximation of ``exp(-i tau Z)`` and the analytic gate-count model.

The synthesizer is a deterministic meet-in-the-middle search.  Every Clifford+T
operator has a unique normal form ``(T | e) (HT | SHT)* C`` (Matsumoto-Amano), so an
operator with T-count at most ``a + b`` splits as ``L . R`` with

    L in  (T | e) (HT | SHT)*     T-count <= a
    R in  (HT | SHT)* C           T-count <= b.

Operators are handled modulo global phase as unit quaternions up to sign
(``U = q0 I - i (q1 X + q2 Y + q3 Z)``); the Euclidean distance between such
quaternions is exactly the phase-invariant operator-norm distance of the matrices.
For a target ``U`` the best ``L . R`` is a nearest-neighbour query of ``L^-1 U`` into a
KD-tree over ``R``.  Budgets ``K = 0, 1, 2, ...`` are tried in turn; the answer for
``eta`` is the best operator at the first budget that reaches ``eta``, which makes the
achieved error monotone in ``eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .circuit import Circuit, compile_unitary, single_qubit_circuit
from .gateset import Gate, GateCountVector, gate_matrix
from .qcore import phase_invariant_distance

DEFAULT_MAX_T = 32


class PrecisionUnreachable(RuntimeError):
    def __init__(self, tau: float, eta: float, floor: float, max_t: int):
        self.tau, self.eta, self.floor, self.max_t = tau, eta, floor, max_t
        super().__init__(
            f"precision unreachable: eta={eta:.3g} for tau={tau:.6g} is below the synthesizer floor "
            f"{floor:.3g} at T-count <= {max_t}")


@dataclass(frozen=True)
class CountModel:
    """``g_eta = ceil(c_log * log2(1/eta))``; ``g_const`` is the flat W-gate figure."""

    c_log: float = 3.0
    g_const: float = 10.0

    def __post_init__(self):
        if self.c_log <= 0:
            raise ValueError("c_log must be positive")


def count_model_g(eta: float, model: CountModel = CountModel()) -> int:
    if not 0 < eta < 1:
        raise ValueError(f"count model needs 0 < eta < 1, got {eta}")
    # the epsilon keeps exact powers of two from rounding up
    return int(math.ceil(model.c_log * math.log2(1 / eta) - 1e-9))


def result_one_counts(eta: float, model: CountModel = CountModel()) -> GateCountVector:
    """Approximate count vector (3g_eta, 2g_eta, g, 0, 3g_eta) for one rotation."""
    g = count_model_g(eta, model)
    return GateCountVector(3 * g, 2 * g, int(round(model.g_const)), 0, 3 * g)


@dataclass(frozen=True)
class SynthesisResult:
    sequence: tuple[Gate, ...]  # time order
    achieved_error: float
    counts: GateCountVector
    target_tau: float
    t_budget: int

    def circuit(self) -> Circuit:
        return single_qubit_circuit(self.sequence, f"exp(-i {self.target_tau:.6g} Z)")

    def tokens(self) -> list[str]:
        return [g.value for g in self.sequence]


def rz_matrix(tau: float) -> np.ndarray:
    """``exp(-i tau Z)``."""
    return np.diag([np.exp(-1j * tau), np.exp(1j * tau)])


# --------------------------------------------------------------------------------------
# quaternion arithmetic


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def qconj(a: np.ndarray) -> np.ndarray:
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def quaternion_of(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    u = u / np.sqrt(np.linalg.det(u))
    a, b = u[0, 0], u[0, 1]
    return np.array([a.real, -b.imag, -b.real, -a.imag])


_C8, _S8 = math.cos(math.pi / 8), math.sin(math.pi / 8)
_Q_H = np.array([0.0, math.sqrt(0.5), 0.0, math.sqrt(0.5)])
_Q_T = np.array([_C8, 0.0, 0.0, _S8])
_Q_S = qmul(_Q_T, _Q_T)
_Q_GEN = {"H": _Q_H, "S": _Q_S, "T": _Q_T}
# syllables in operator order (rightmost acts first)
_SYLLABLES = (("H", "T"), ("S", "H", "T"))
_Q_SYL = tuple(qmul(_Q_GEN[s[0]], qmul(_Q_GEN[s[1]], _Q_GEN[s[2]])) if len(s) == 3
               else qmul(_Q_GEN[s[0]], _Q_GEN[s[1]]) for s in _SYLLABLES)


def _canon(q: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(q) > 1e-9))
    return q if q[i] > 0 else -q


@lru_cache(maxsize=1)
def clifford_group() -> tuple[np.ndarray, tuple[tuple[str, ...], ...]]:
    """The 24 single-qubit Cliffords modulo phase with shortest H/S words (operator order)."""
    quats = [np.array([1.0, 0.0, 0.0, 0.0])]
    words: list[tuple[str, ...]] = [()]
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g in ("H", "S"):
                p = _canon(qmul(quats[i], _Q_GEN[g]))
                if not any(abs(abs(p @ q) - 1) < 1e-9 for q in quats):
                    quats.append(p)
                    words.append(words[i] + (g,))
                    nxt.append(len(quats) - 1)
        frontier = nxt
    return np.array(quats), tuple(words)


class CliffordTSearch:
    """Search tables for one T-count cap; build once and reuse across targets."""

    def __init__(self, max_t: int = DEFAULT_MAX_T):
        if max_t < 0:
            raise ValueError("max_t must be non-negative")
        self.max_t = max_t
        self.cliffords, self.clifford_words = clifford_group()
        self._right_layers = [self.cliffords]
        self._left_np = [np.array([[1.0, 0.0, 0.0, 0.0]])]
        self._trees: dict[int, cKDTree] = {}
        self._left_cum: dict[int, np.ndarray] = {}
        self._rungs: dict[float, list[tuple[float, int, int]]] = {}

    # tables ---------------------------------------------------------------------------

    def _right_layer(self, j: int) -> np.ndarray:
        while len(self._right_layers) <= j:
            prev = self._right_layers[-1]
            self._right_layers.append(np.concatenate([qmul(_Q_SYL[0], prev), qmul(_Q_SYL[1], prev)]))
        return self._right_layers[j]

    def _left_np_layer(self, i: int) -> np.ndarray:
        while len(self._left_np) <= i:
            prev = self._left_np[-1]
            self._left_np.append(np.concatenate([qmul(prev, _Q_SYL[0]), qmul(prev, _Q_SYL[1])]))
        return self._left_np[i]

    def _left_layer(self, i: int) -> np.ndarray:
        # exact T-count i: syllables^i, then T . syllables^(i-1)
        if i == 0:
            return self._left_np_layer(0)
        return np.concatenate([self._left_np_layer(i), qmul(_Q_T, self._left_np_layer(i - 1))])

    def _left_upto(self, a: int) -> np.ndarray:
        if a not in self._left_cum:
            self._left_cum[a] = np.concatenate([self._left_layer(i) for i in range(a + 1)])
        return self._left_cum[a]

    def _tree(self, b: int) -> cKDTree:
        if b not in self._trees:
            pts = np.concatenate([self._right_layer(j) for j in range(b + 1)])
            self._trees[b] = cKDTree(pts)
        return self._trees[b]

    # decoding -------------------------------------------------------------------------

    def _left_word(self, idx: int) -> tuple[str, ...]:
        i = 0
        while True:
            size = 1 if i == 0 else (1 << i) + (1 << (i - 1))
            if idx < size:
                break
            idx -= size
            i += 1
        prefix: tuple[str, ...] = ()
        m = i
        if i > 0 and idx >= (1 << i):
            prefix, idx, m = ("T",), idx - (1 << i), i - 1
        sylls = []
        for level in range(m, 0, -1):
            half = 1 << (level - 1)
            sylls.append(_SYLLABLES[idx >= half])
            idx %= half
        return prefix + tuple(t for s in reversed(sylls) for t in s)

    def _right_word(self, idx: int) -> tuple[str, ...]:
        j = 0
        while idx >= len(self._right_layer(j)):
            idx -= len(self._right_layer(j))
            j += 1
        out: list[str] = []
        for level in range(j, 0, -1):
            half = len(self._right_layer(level - 1))
            out.extend(_SYLLABLES[idx >= half])
            idx %= half
        return tuple(out) + self.clifford_words[idx]

    # search ---------------------------------------------------------------------------

    def _rung(self, q_target: np.ndarray, k: int, bound: float) -> tuple[float, int, int]:
        a, b = (k + 1) // 2, k // 2
        queries = qmul(qconj(self._left_upto(a)), q_target)
        tree = self._tree(b)
        ub = np.nextafter(bound, np.inf) if np.isfinite(bound) else np.inf
        best = (np.inf, -1, -1)
        for sign in (1.0, -1.0):
            d, j = tree.query(sign * queries, distance_upper_bound=ub)
            i = int(np.argmin(d))
            if d[i] < best[0]:
                best = (float(d[i]), i, int(j[i]))
        return best

    def rungs(self, tau: float, upto: int) -> list[tuple[float, int, int]]:
        """Best (distance, left index, right index) for every T budget ``0..upto``."""
        key = float(tau)
        found = self._rungs.setdefault(key, [])
        q_target = np.array([math.cos(tau), 0.0, 0.0, math.sin(tau)])
        while len(found) <= min(upto, self.max_t):
            bound = found[-1][0] if found else np.inf
            cand = self._rung(q_target, len(found), bound)
            found.append(cand if cand[0] < bound else found[-1])
        return found

    def floor(self, tau: float) -> float:
        return self.rungs(tau, self.max_t)[-1][0]

    def synthesize(self, tau: float, eta: float) -> SynthesisResult:
        if not eta > 0:
            raise ValueError("eta must be positive")
        tau_red = math.remainder(float(tau), 2 * math.pi)
        for k in range(self.max_t + 1):
            dist, li, ri = self.rungs(tau_red, k)[k]
            if dist <= eta:
                break
        else:
            raise PrecisionUnreachable(tau, eta, self.floor(tau_red), self.max_t)
        op_word = self._left_word(li) + self._right_word(ri)
        tokens = [Gate(t) for t in reversed(op_word)]
        target = rz_matrix(tau_red)
        u = compile_unitary(single_qubit_circuit(tokens))
        tokens += _phase_fix(u, target)
        u = compile_unitary(single_qubit_circuit(tokens))
        err = phase_invariant_distance(u, target)
        return SynthesisResult(tuple(tokens), err, GateCountVector.of(tokens), float(tau), k)


def _phase_fix(u: np.ndarray, target: np.ndarray) -> list[Gate]:
    """W gates that bring the global phase of ``u`` to within pi/8 of ``target``."""
    phi = float(np.angle(np.trace(target.conj().T @ u)))
    k = int(round(-phi / (math.pi / 4)))
    if abs(phi) <= math.pi / 8 + 1e-9:
        k = 0
    k = (k + 4) % 8 - 4
    return [Gate.W] * k if k > 0 else [Gate.Wdg] * (-k)


@lru_cache(maxsize=4)
def default_search(max_t: int = DEFAULT_MAX_T) -> CliffordTSearch:
    return CliffordTSearch(max_t)


def synthesize_rz(tau: float, eta: float, max_t: int = DEFAULT_MAX_T) -> SynthesisResult:
    """Clifford+T sequence within ``eta`` of ``exp(-i tau Z)`` up to global phase."""
    return default_search(max_t).synthesize(tau, eta)


def inverse_result(r: SynthesisResult) -> SynthesisResult:
    """The adjoint sequence, which approximates ``exp(+i tau Z)`` to the same error."""
    seq = tuple(g.dagger for g in reversed(r.sequence))
    return SynthesisResult(seq, r.achieved_error, GateCountVector.of(seq), -r.target_tau, r.t_budget)


def verify(result: SynthesisResult) -> float:
    """Recompile the sequence and measure its distance to the target."""
    u = compile_unitary(result.circuit())
    return phase_invariant_distance(u, rz_matrix(result.target_tau))


__all__ = [
    "CountModel", "count_model_g", "result_one_counts", "SynthesisResult", "PrecisionUnreachable",
    "CliffordTSearch", "synthesize_rz", "inverse_result", "verify", "rz_matrix", "gate_matrix",
]
