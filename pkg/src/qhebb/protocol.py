"""Batched controlled state exponentiation: channel simulation and error/resource calculus.

The simulated system is the learning qubit plus N processing qubits.  Each step attaches
a fresh data register in ``|x_m>`` (and, for compiled swaps, the |0> ancilla), applies the
controlled partial swap, and traces the fresh qubits out again, so every channel stays on
``1 + N`` qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .cpswap import CPSwapSpec, build_cpswap_circuit, cpswap_count_formula, exact_cpswap
from .circuit import compile_unitary
from .gateset import GateCountVector, GateErrorVector, count_dot
from .qcore import (QuantumChannel, channel_distance, channel_from_unitary, check_state, kron,
                    matrix_exp_hermitian, num_qubits_of, projector, superop_distance)
from .rzsynth import CountModel, count_model_g

MAX_QUBITS = 12


class QubitCapExceeded(ValueError):
    pass


class SwapMode(str, Enum):
    IDEAL = "ideal_swap"
    COMPILED = "compiled_circuit"


@dataclass(frozen=True)
class TrainingBatch:
    states: tuple[np.ndarray, ...]
    t_data: float | None = None  # declared per-state preparation cost, if known

    def __post_init__(self):
        if not self.states:
            raise ValueError("empty batch")
        states = tuple(check_state(s, tol=1e-10) for s in self.states)
        sizes = {s.size for s in states}
        if len(sizes) != 1:
            raise ValueError(f"batch states have different dimensions: {sorted(sizes)}")
        for s in states:
            s.setflags(write=False)
        object.__setattr__(self, "states", states)

    @classmethod
    def of(cls, *states, t_data: float | None = None) -> "TrainingBatch":
        return cls(tuple(np.asarray(s, dtype=complex) for s in states), t_data)

    @property
    def M(self) -> int:
        return len(self.states)

    @property
    def N(self) -> int:
        return num_qubits_of(self.states[0].size)


@dataclass(frozen=True)
class ProtocolParams:
    t: float
    n: int = 1
    mode: SwapMode = SwapMode.IDEAL
    synthesis_eta: float = 1e-3

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("the number of batches must satisfy n >= 1")
        object.__setattr__(self, "mode", SwapMode(self.mode))


def ensemble_state(batch: TrainingBatch) -> np.ndarray:
    return sum(projector(s) for s in batch.states) / batch.M


def controlled_exponential(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t |1><1| (x) h)``."""
    d = h.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d)
    out[d:, d:] = matrix_exp_hermitian(h, t)
    return out


def step_unitary(x: np.ndarray, theta: float) -> np.ndarray:
    """The ideal per-state step ``|0><0| (x) I + |1><1| (x) exp(-i theta |x><x|)``."""
    return controlled_exponential(projector(x), theta)


@lru_cache(maxsize=64)
def _compiled_swap_unitary(theta: float, eta: float) -> np.ndarray:
    return compile_unitary(build_cpswap_circuit(CPSwapSpec(1, theta, eta)).circuit)


def single_swap_channel(x: np.ndarray, theta: float, mode: SwapMode | str = SwapMode.IDEAL,
                        synthesis_eta: float = 1e-3) -> QuantumChannel:
    """Attach ``|x>``, apply the controlled partial swap by ``theta``, discard the data register."""
    x = check_state(x, tol=1e-10)
    mode = SwapMode(mode)
    n = num_qubits_of(x.size)
    sys_q = 1 + n
    env = x
    if mode is SwapMode.IDEAL:
        u = exact_cpswap(CPSwapSpec(n, theta))
    else:
        if n != 1:
            raise ValueError("compiled_circuit mode supports N = 1 only")
        u = _compiled_swap_unitary(float(theta), float(synthesis_eta))
        env = kron(x, np.array([1.0, 0.0]))
    if sys_q + num_qubits_of(env.size) > MAX_QUBITS:
        raise QubitCapExceeded(f"{sys_q + num_qubits_of(env.size)} qubits exceed the cap of {MAX_QUBITS}")
    ds, de = 1 << sys_q, env.size
    v = (u @ kron(np.eye(ds), env.reshape(-1, 1))).reshape(ds, de, ds)
    return QuantumChannel.from_kraus([v[:, j, :] for j in range(de)], sys_q)


def batch_channel(batch: TrainingBatch, theta: float, mode: SwapMode | str = SwapMode.IDEAL,
                  synthesis_eta: float = 1e-3) -> QuantumChannel:
    """``W_M ... W_1`` with every step at angle ``theta``."""
    s = None
    for x in batch.states:
        w = single_swap_channel(x, theta, mode, synthesis_eta).superop
        s = w if s is None else w @ s
    return QuantumChannel.from_superop(s, 1 + batch.N, 1 + batch.N)


def _check_cap(batch: TrainingBatch, mode: SwapMode) -> None:
    total = 1 + 2 * batch.N + (mode is SwapMode.COMPILED)
    if total > MAX_QUBITS:
        raise QubitCapExceeded(f"{total} simulated qubits exceed the cap of {MAX_QUBITS}")


def run_bcqse(batch: TrainingBatch, params: ProtocolParams) -> QuantumChannel:
    """``(W_M ... W_1)^n`` with per-step angle ``t / (n M)``."""
    _check_cap(batch, params.mode)
    theta = params.t / (params.n * batch.M)
    return batch_channel(batch, theta, params.mode, params.synthesis_eta).power(params.n)


def trotter_channel(batch: TrainingBatch, params: ProtocolParams) -> QuantumChannel:
    """``(U_M ... U_1)^n``: the product-formula part of the protocol without swap error."""
    theta = params.t / (params.n * batch.M)
    u = np.eye(1 << (1 + batch.N), dtype=complex)
    for x in batch.states:
        u = step_unitary(x, theta) @ u
    return channel_from_unitary(np.linalg.matrix_power(u, params.n))


def target_unitary(batch: TrainingBatch, t: float) -> np.ndarray:
    return controlled_exponential(ensemble_state(batch), t)


def target_channel(batch: TrainingBatch, t: float) -> QuantumChannel:
    return channel_from_unitary(target_unitary(batch, t))


def protocol_errors(batch: TrainingBatch, params: ProtocolParams) -> dict[str, float]:
    """Both distance proxies between the protocol channel and its target."""
    got = run_bcqse(batch, params)
    want = target_channel(batch, params.t)
    return {"choi_distance": channel_distance(got, want), "op_distance_proxy": superop_distance(got, want)}


def alpha_fit(points) -> float:
    """Least-squares ``alpha`` in ``error * n = alpha * t^2`` from ``(t, n, error)`` triples."""
    pts = [(float(t), int(n), float(e)) for t, n, e in points]
    if not pts:
        raise ValueError("alpha_fit needs at least one point")
    num = sum(e * n * t * t for t, n, e in pts)
    den = sum(t ** 4 for t, _, _ in pts)
    if den == 0:
        raise ValueError("alpha_fit needs a nonzero t")
    return num / den


# --------------------------------------------------------------------------------------
# error model


@dataclass(frozen=True)
class ErrorModelParams:
    alpha: float
    gate_errors: GateErrorVector = field(default_factory=GateErrorVector)
    eta: float = 0.0
    M: int = 1
    N: int = 1
    g_eta: int = 0
    g_const: int = 10

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")

    def gate_counts(self) -> GateCountVector:
        return cpswap_count_formula(self.N, self.g_eta, self.g_const)

    def swap_cost(self) -> float:
        """Error of one imperfect controlled partial swap: ``eps_g . g(eta) + 2 eta``."""
        return count_dot(self.gate_errors, self.gate_counts()) + 2 * self.eta


def error_model(params: ErrorModelParams, t: float, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return params.alpha * t * t / n + n * params.M * params.swap_cost()


class UnboundedN(ValueError):
    """Raised when the per-swap cost vanishes, so more batches always help."""


@dataclass(frozen=True)
class OptimalN:
    n: int
    unclamped: float
    failure_regime: bool  # unclamped optimum below 1: n is pinned to 1


def optimal_n(params: ErrorModelParams, t: float) -> OptimalN:
    cost = params.swap_cost()
    if cost <= 0:
        raise UnboundedN("zero per-swap cost: the error model decreases without bound in n")
    x = abs(t) * math.sqrt(params.alpha / (params.M * cost))
    cands = {max(1, math.floor(x)), max(1, math.ceil(x))}
    best = min(sorted(cands), key=lambda k: error_model(params, t, k))
    return OptimalN(best, x, x < 1)


def minimal_error(params: ErrorModelParams, t: float) -> float:
    """Closed-form error at the continuous optimum: ``2 t sqrt(alpha M cost)``."""
    return 2 * abs(t) * math.sqrt(params.alpha * params.M * params.swap_cost())


# --------------------------------------------------------------------------------------
# resources


@dataclass(frozen=True)
class ResourceConfig:
    alpha: float = 1.0
    gate_errors: GateErrorVector = field(default_factory=lambda: GateErrorVector.uniform(1e-6))
    eta: float = 1e-3
    count_model: CountModel = field(default_factory=CountModel)
    delta1: float = 0.1  # eta = delta1 / (n^2 M)
    delta2: float = 0.1  # eps_g = delta2 / (n^2 M g(eta))
    C: float = 1.0  # n = ceil(C (t^2 + 1) / epsilon)
    c_gate_ec: float = 1.0  # physical gates per logical gate per bit of precision
    c_qubit_ec: float = 1.0  # physical qubits per logical gate per bit of precision
    t_data: float | None = None


def _log_overhead(eps: float, c: float) -> int:
    return max(1, math.ceil(c * math.log2(1 / eps)))


def resource_report(N: int, M: int, t: float, epsilon: float | None = None, regime: str = "fixed",
                    config: ResourceConfig = ResourceConfig()) -> dict:
    if N < 1 or M < 1 or t <= 0:
        raise ValueError("resource_report needs positive N, M and t")
    g_const = int(round(config.count_model.g_const))
    out: dict = {"regime": regime, "N": N, "M": M, "t": t}
    if regime == "fixed":
        g_eta = count_model_g(config.eta, config.count_model)
        params = ErrorModelParams(config.alpha, config.gate_errors, config.eta, M, N, g_eta, g_const)
        opt = optimal_n(params, t)
        n = opt.n
        gvec = params.gate_counts()
        out.update(n=n, n_unclamped=opt.unclamped, failure_regime=opt.failure_regime, eta=config.eta,
                   g_eta=g_eta, error=error_model(params, t, n), closed_form_error=minimal_error(params, t))
        logical_gates = gvec * (n * M)
        physical_gates, physical_qubits = logical_gates.total(), (n * M + 1) * (N + 1)
    elif regime == "error_corrected":
        if epsilon is None or not epsilon > 0:
            raise ValueError("the error-corrected regime needs a positive target epsilon")
        n = max(1, math.ceil(config.C * (t * t + 1) / epsilon))
        eta = config.delta1 / (n * n * M)
        g_eta = count_model_g(eta, config.count_model)
        gvec = cpswap_count_formula(N, g_eta, g_const)
        eps_g = [config.delta2 / (n * n * M * g) for g in gvec.as_tuple()]
        gates_ec = [_log_overhead(e, config.c_gate_ec) for e in eps_g]
        qubits_ec = [_log_overhead(e, config.c_qubit_ec) for e in eps_g]
        per_swap_gates = sum(G * g for G, g in zip(gates_ec, gvec.as_tuple()))
        per_swap_qubits = sum(q * g for q, g in zip(qubits_ec, gvec.as_tuple()))
        logical_gates = gvec * (n * M)
        physical_gates = n * M * per_swap_gates
        physical_qubits = (n * M + 1) * (N + 1) + n * M * per_swap_qubits
        delta = 2 * config.delta1 + 5 * config.delta2
        out.update(n=n, eta=eta, g_eta=g_eta, epsilon=epsilon, gate_errors=eps_g,
                   ec_gate_overhead=gates_ec, ec_qubit_overhead=qubits_ec,
                   physical_gates_per_swap=per_swap_gates, physical_qubits_per_swap=per_swap_qubits,
                   error=(config.alpha * t * t + delta) / n,
                   constants={"delta1": config.delta1, "delta2": config.delta2, "C": config.C})
    else:
        raise ValueError(f"unknown regime {regime!r}")
    out.update(
        logical_qubits=(n * M + 1) * (N + 1),
        logical_gates=logical_gates.as_tuple(),
        physical_qubits=physical_qubits,
        physical_gates=physical_gates,
        data_states=n * M,
    )
    if config.t_data is not None:
        out["data_preparation_time"] = n * M * config.t_data
    return out
