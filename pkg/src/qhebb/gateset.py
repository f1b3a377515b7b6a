"""The Clifford+T alphabet and the (H, S, W, CNOT, T) bookkeeping."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from enum import Enum

import numpy as np

_R2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)


class Gate(str, Enum):
    H = "H"
    S = "S"
    Sdg = "Sdg"
    W = "W"
    Wdg = "Wdg"
    T = "T"
    Tdg = "Tdg"
    CNOT = "CNOT"

    @property
    def arity(self) -> int:
        return 2 if self is Gate.CNOT else 1

    @property
    def dagger(self) -> "Gate":
        return _DAGGER[self]

    @property
    def base(self) -> "Gate":
        """Kind under which the gate is tallied (daggers fold into their base gate)."""
        return _BASE[self]


_DAGGER = {
    Gate.H: Gate.H, Gate.S: Gate.Sdg, Gate.Sdg: Gate.S, Gate.W: Gate.Wdg, Gate.Wdg: Gate.W,
    Gate.T: Gate.Tdg, Gate.Tdg: Gate.T, Gate.CNOT: Gate.CNOT,
}
_BASE = {
    Gate.H: Gate.H, Gate.S: Gate.S, Gate.Sdg: Gate.S, Gate.W: Gate.W, Gate.Wdg: Gate.W,
    Gate.T: Gate.T, Gate.Tdg: Gate.T, Gate.CNOT: Gate.CNOT,
}

_MATRICES = {
    Gate.H: np.array([[_R2, _R2], [_R2, -_R2]], dtype=complex),
    Gate.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    Gate.T: np.array([[1, 0], [0, _W]], dtype=complex),
    Gate.W: np.array([[_W, 0], [0, _W]], dtype=complex),
    Gate.CNOT: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}
_MATRICES[Gate.Sdg] = _MATRICES[Gate.S].conj().T
_MATRICES[Gate.Tdg] = _MATRICES[Gate.T].conj().T
_MATRICES[Gate.Wdg] = _MATRICES[Gate.W].conj().T
for _m in _MATRICES.values():
    _m.setflags(write=False)


def gate_matrix(g: Gate | str) -> np.ndarray:
    """Matrix of ``g``; CNOT has its control on the first (most significant) qubit."""
    return _MATRICES[Gate(g)]


@dataclass(frozen=True)
class GateCountVector:
    """Gate tally in the order (H, S, W, CNOT, T)."""

    h: int = 0
    s: int = 0
    w: int = 0
    cnot: int = 0
    t: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v < 0:
                raise ValueError(f"negative gate count {f.name}={v}")

    def __add__(self, other: "GateCountVector") -> "GateCountVector":
        return GateCountVector(*(a + b for a, b in zip(astuple(self), astuple(other))))

    def __sub__(self, other: "GateCountVector") -> tuple[int, ...]:
        # differences may be negative, so they are not a count vector
        return tuple(a - b for a, b in zip(astuple(self), astuple(other)))

    def __mul__(self, k: int) -> "GateCountVector":
        return GateCountVector(*(k * a for a in astuple(self)))

    __rmul__ = __mul__

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return astuple(self)

    def total(self) -> int:
        return sum(astuple(self))

    @classmethod
    def of(cls, gates) -> "GateCountVector":
        tally = dict.fromkeys(("h", "s", "w", "cnot", "t"), 0)
        key = {Gate.H: "h", Gate.S: "s", Gate.W: "w", Gate.CNOT: "cnot", Gate.T: "t"}
        for g in gates:
            tally[key[Gate(g).base]] += 1
        return cls(**tally)


@dataclass(frozen=True)
class GateErrorVector:
    """Operator-norm error per application of (H, S, W, CNOT, T)."""

    eps_h: float = 0.0
    eps_s: float = 0.0
    eps_w: float = 0.0
    eps_cnot: float = 0.0
    eps_t: float = 0.0

    def __post_init__(self):
        if any(v < 0 for v in astuple(self)):
            raise ValueError("gate errors must be non-negative")

    @classmethod
    def uniform(cls, eps: float) -> "GateErrorVector":
        return cls(eps, eps, eps, eps, eps)

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


def count_dot(errs: GateErrorVector, counts: GateCountVector) -> float:
    return float(sum(e * c for e, c in zip(errs.as_tuple(), counts.as_tuple())))
