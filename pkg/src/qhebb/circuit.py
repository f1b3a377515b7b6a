"""Circuit IR over the Clifford+T alphabet.

Gates are stored in time order (first gate applies first).  The text format is one
gate per line, ``KIND q0 [q1]``, with ``#`` starting a comment; an optional
``# qubits: n`` / ``# label: ...`` header pins the register size and label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gateset import Gate, GateCountVector, gate_matrix
from .qcore import DimensionError, apply_operator_to_columns, check_density


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[tuple[Gate, tuple[int, ...]], ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        norm = []
        for g, qs in self.gates:
            g = Gate(g)
            qs = tuple(int(q) for q in qs)
            if len(qs) != g.arity:
                raise ValueError(f"{g.value} takes {g.arity} qubit(s), got {qs}")
            if len(set(qs)) != len(qs):
                raise ValueError(f"{g.value} needs distinct qubits, got {qs}")
            if any(q < 0 or q >= self.num_qubits for q in qs):
                raise IndexError(f"{g.value} on {qs} is outside a {self.num_qubits}-qubit circuit")
            norm.append((g, qs))
        object.__setattr__(self, "gates", tuple(norm))

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return self.concat(other)

    def concat(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise DimensionError("cannot concatenate circuits of different widths")
        return Circuit(self.num_qubits, self.gates + other.gates, self.label or other.label)

    def dagger(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple((g.dagger, qs) for g, qs in reversed(self.gates)), self.label)

    def remap(self, wires, num_qubits: int | None = None) -> "Circuit":
        """Relabel qubit ``i`` as ``wires[i]`` inside a (possibly wider) register."""
        num_qubits = self.num_qubits if num_qubits is None else num_qubits
        return Circuit(num_qubits, tuple((g, tuple(wires[q] for q in qs)) for g, qs in self.gates), self.label)

    def with_label(self, label: str) -> "Circuit":
        return Circuit(self.num_qubits, self.gates, label)


class CircuitBuilder:
    """Mutable helper for assembling circuits gate by gate."""

    def __init__(self, num_qubits: int, label: str = ""):
        self.num_qubits = num_qubits
        self.label = label
        self._gates: list[tuple[Gate, tuple[int, ...]]] = []

    def add(self, gate, *qubits: int) -> "CircuitBuilder":
        self._gates.append((Gate(gate), tuple(qubits)))
        return self

    def extend(self, c: Circuit, wires=None) -> "CircuitBuilder":
        if wires is not None:
            c = c.remap(wires, self.num_qubits)
        elif c.num_qubits != self.num_qubits:
            raise DimensionError("sub-circuit width differs; pass wires")
        self._gates.extend(c.gates)
        return self

    def build(self) -> Circuit:
        return Circuit(self.num_qubits, tuple(self._gates), self.label)


def single_qubit_circuit(tokens, label: str = "") -> Circuit:
    return Circuit(1, tuple((Gate(t), (0,)) for t in tokens), label)


# --------------------------------------------------------------------------------------
# simulation


def apply_to_state(c: Circuit, psi: np.ndarray) -> np.ndarray:
    """Gate-by-gate state-vector simulation."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (1 << c.num_qubits,):
        raise DimensionError(f"state of length {psi.size} does not fit {c.num_qubits} qubits")
    for g, qs in c.gates:
        psi = apply_operator_to_columns(gate_matrix(g), qs, c.num_qubits, psi)
    return psi


def compile_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(1 << c.num_qubits, dtype=complex)
    for g, qs in c.gates:
        u = apply_operator_to_columns(gate_matrix(g), qs, c.num_qubits, u)
    return u


def apply_to_density(c: Circuit, rho_in: np.ndarray) -> np.ndarray:
    rho_in = np.asarray(rho_in, dtype=complex)
    if rho_in.shape != (1 << c.num_qubits, 1 << c.num_qubits):
        raise DimensionError(f"density matrix of shape {rho_in.shape} does not fit {c.num_qubits} qubits")
    check_density(rho_in, tol=1e-9)
    u = compile_unitary(c)
    return u @ rho_in @ u.conj().T


def gate_count(c: Circuit) -> GateCountVector:
    return GateCountVector.of(g for g, _ in c.gates)


# --------------------------------------------------------------------------------------
# fixed templates (two-qubit: control 0, target 1; Toffoli: controls 0, 1, target 2)

_CRY_TOKENS = ("S", "H", "T", "H", "Sdg", None, "S", "H", "Tdg", "H", "Sdg", None)


def _cry_template(swap_t: bool) -> Circuit:
    b = CircuitBuilder(2, "controlled-Ry(pi/2)" + ("^dag" if swap_t else ""))
    for tok in _CRY_TOKENS:
        if tok is None:
            b.add(Gate.CNOT, 0, 1)
            continue
        g = Gate(tok)
        if swap_t and g in (Gate.T, Gate.Tdg):
            g = g.dagger
        b.add(g, 1)
    return b.build()


# As drawn, the sequence S H T H S^dag . CNOT . S H T^dag H S^dag . CNOT implements
# |0><0| (x) I + |1><1| (x) exp(+i pi/4 Y) with the usual Y = [[0,-i],[i,0]]; that is
# exactly the basis change the swap-parity construction needs on its way in.
CONTROLLED_RY_TEMPLATE = _cry_template(swap_t=False)
# T <-> T^dag gives the inverse rotation, used on the way out.
CONTROLLED_RY_INVERSE_TEMPLATE = _cry_template(swap_t=True)

TOFFOLI_TEMPLATE = (
    CircuitBuilder(3, "toffoli")
    .add("H", 2).add("CNOT", 1, 2).add("Tdg", 2).add("CNOT", 0, 2).add("T", 2)
    .add("CNOT", 1, 2).add("Tdg", 2).add("CNOT", 0, 2).add("T", 2).add("Tdg", 1)
    .add("H", 2).add("CNOT", 0, 1).add("Tdg", 1).add("CNOT", 0, 1).add("T", 0).add("S", 1)
    .build()
)


def controlled(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d)
    out[d:, d:] = u
    return out


def ry_exponential(sign: int) -> np.ndarray:
    """``exp(sign * i pi/4 Y)``."""
    c = s = 1 / np.sqrt(2)
    return np.array([[c, sign * s], [-sign * s, c]], dtype=complex)


def toffoli_matrix() -> np.ndarray:
    m = np.eye(8, dtype=complex)
    m[[6, 7]] = m[[7, 6]]
    return m


# --------------------------------------------------------------------------------------
# text format


def to_text(c: Circuit) -> str:
    lines = [f"# qubits: {c.num_qubits}"]
    if c.label:
        lines.append(f"# label: {c.label}")
    lines += [" ".join([g.value, *map(str, qs)]) for g, qs in c.gates]
    return "\n".join(lines) + "\n"


def from_text(text: str, num_qubits: int | None = None) -> Circuit:
    gates = []
    label = ""
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        comment = comment.strip()
        if comment.startswith("qubits:"):
            declared = int(comment.split(":", 1)[1])
        elif comment.startswith("label:"):
            label = comment.split(":", 1)[1].strip()
        parts = line.split()
        if not parts:
            continue
        try:
            g = Gate(parts[0])
            qs = tuple(int(p) for p in parts[1:])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}") from exc
        gates.append((g, qs))
    n = num_qubits or declared
    if n is None:
        n = 1 + max((q for _, qs in gates for q in qs), default=0)
    return Circuit(n, tuple(gates), label)
