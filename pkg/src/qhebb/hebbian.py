"""Hebbian weight matrices, amplitude encoding, and the rho - I/d correspondence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .qcore import QuantumChannel, channel_from_unitary, num_qubits_of, op_norm
from .protocol import (ProtocolParams, TrainingBatch, batch_channel, controlled_exponential, ensemble_state,
                       _check_cap)
from .rzsynth import DEFAULT_MAX_T, synthesize_rz


@dataclass(frozen=True)
class PatternSet:
    """M patterns of length d = 2^N.

    Strict sets hold exact +-1 entries.  Lenient sets (``PatternSet.lenient``) hold
    arbitrary real rows rescaled to norm sqrt(d); the rho - I/d = W identity does not hold
    for them and is only reported.
    """

    patterns: np.ndarray
    strict: bool = True

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.patterns, dtype=float))
        if p.size == 0:
            raise ValueError("empty batch")
        num_qubits_of(p.shape[1])
        if self.strict and not np.all(np.isin(p, (-1.0, 1.0))):
            raise ValueError("patterns must have entries exactly +1 or -1")
        if not self.strict:
            norms = np.linalg.norm(p, axis=1)
            if np.any(norms == 0):
                raise ValueError("lenient patterns must be nonzero")
            p = p / norms[:, None] * np.sqrt(p.shape[1])
        p.setflags(write=False)
        object.__setattr__(self, "patterns", p)

    @classmethod
    def lenient(cls, rows) -> "PatternSet":
        return cls(np.asarray(rows, dtype=float), strict=False)

    @property
    def M(self) -> int:
        return self.patterns.shape[0]

    @property
    def d(self) -> int:
        return self.patterns.shape[1]

    @property
    def N(self) -> int:
        return num_qubits_of(self.d)


@dataclass(frozen=True)
class HebbianWeightMatrix:
    d: int
    w: np.ndarray


def build_weight_matrix(p: PatternSet) -> HebbianWeightMatrix:
    """``W_ij = (1/(M d)) sum_m x_i x_j`` off the diagonal, zero on it."""
    x = p.patterns
    w = x.T @ x / (p.M * p.d)
    np.fill_diagonal(w, 0.0)
    return HebbianWeightMatrix(p.d, w)


def amplitude_encode(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    num_qubits_of(x.size)
    if not np.all(np.isin(x, (-1.0, 1.0))):
        raise ValueError("amplitude_encode expects +-1 entries; use PatternSet.lenient for real data")
    return (x / np.sqrt(x.size)).astype(complex)


def encode_batch(p: PatternSet, t_data: float | None = None) -> TrainingBatch:
    states = [(row / np.linalg.norm(row)).astype(complex) for row in p.patterns]
    return TrainingBatch(tuple(states), t_data)


def quantum_hebbian_identity_check(p: PatternSet) -> float:
    """``||(rho - I/d) - W||_op`` for the encoded patterns."""
    rho = ensemble_state(encode_batch(p))
    w = build_weight_matrix(p).w
    return op_norm(rho - np.eye(p.d) / p.d - w)


def phase_correction_unitary(delta_t: float, d: int) -> np.ndarray:
    """``exp(+i delta_t |1><1| (x) I_d/d)`` restricted to the learning qubit."""
    return np.diag([1.0, np.exp(1j * delta_t / d)])


def identity_phase_correction(delta_t: float, d: int, eta: float = 1e-3,
                              max_t: int = DEFAULT_MAX_T) -> Circuit:
    """Clifford+T circuit on the learning qubit equal to diag(1, e^{i delta_t/d}) up to phase.

    ``exp(-i tau Z) = e^{-i tau} diag(1, e^{2 i tau})``, so the synthesizer gets ``tau = phi/2``.
    """
    phi = delta_t / d
    return synthesize_rz(phi / 2, eta, max_t=max_t).circuit().with_label(f"hebbian phase {phi:.6g}")


def corrected_bcqse(batch: TrainingBatch, params: ProtocolParams) -> QuantumChannel:
    """bcQSE with the exact conditional phase applied after every batch.

    Converges to ``exp(-i t |1><1| (x) (rho - I/d))``.
    """
    _check_cap(batch, params.mode)
    d = 1 << batch.N
    theta = params.t / (params.n * batch.M)
    step = batch_channel(batch, theta, params.mode, params.synthesis_eta)
    phase = np.kron(phase_correction_unitary(params.t / params.n, d), np.eye(d))
    s = channel_from_unitary(phase).superop @ step.superop
    return QuantumChannel.from_superop(np.linalg.matrix_power(s, params.n), step.in_qubits, step.out_qubits)


def weight_target_channel(p: PatternSet, t: float) -> QuantumChannel:
    """``exp(-i t |1><1| (x) W)`` for the Hebbian matrix of ``p``."""
    return channel_from_unitary(controlled_exponential(build_weight_matrix(p).w, t))
