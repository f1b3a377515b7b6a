"""JSON batch files and state specifications.

Batch files hold either explicit states::

    {"n_qubits": 1, "states": [[[1, 0], [0, 0]], [[0.7071, 0], [0.7071, 0]]], "t_data": 1.0}

(each amplitude a ``[re, im]`` pair) or +-1 patterns that are amplitude-encoded on load::

    {"patterns": [[1, -1, 1, 1], [1, 1, -1, 1]]}

``"lenient": true`` next to ``patterns`` accepts arbitrary real rows.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hebbian import PatternSet, encode_batch
from .protocol import TrainingBatch, ensemble_state
from .qcore import basis_state


class InputError(ValueError):
    """Malformed user input; the message names the offending field."""


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    return doc


def _t_data(doc: dict):
    t = doc.get("t_data")
    if t is None:
        return None
    if not isinstance(t, (int, float)) or isinstance(t, bool) or t < 0:
        raise InputError("t_data: must be a non-negative number")
    return float(t)


def parse_amplitudes(raw, field: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise InputError(f"{field}: expected a non-empty list of [re, im] pairs")
    out = []
    for j, a in enumerate(raw):
        if isinstance(a, (int, float)) and not isinstance(a, bool):
            out.append(complex(a))
            continue
        if (not isinstance(a, list) or len(a) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in a)):
            raise InputError(f"{field}[{j}]: expected [re, im]")
        out.append(complex(a[0], a[1]))
    return np.array(out)


def load_patterns(path) -> PatternSet:
    doc = _load_json(path)
    return patterns_from_doc(doc)


def patterns_from_doc(doc: dict) -> PatternSet:
    rows = doc.get("patterns")
    if not isinstance(rows, list):
        raise InputError("patterns: missing or not a list")
    if not rows:
        raise InputError("patterns: empty batch")
    width = None
    for i, r in enumerate(rows):
        if not isinstance(r, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in r):
            raise InputError(f"patterns[{i}]: expected a list of numbers")
        if width is None:
            width = len(r)
        elif len(r) != width:
            raise InputError(f"patterns[{i}]: length {len(r)} differs from {width}")
    if width == 0 or width & (width - 1):
        raise InputError(f"patterns: length {width} is not a power of two")
    lenient = bool(doc.get("lenient", False))
    arr = np.array(rows, dtype=float)
    if lenient:
        try:
            return PatternSet.lenient(arr)
        except ValueError as exc:
            raise InputError(f"patterns: {exc}") from exc
    bad = np.argwhere(~np.isin(arr, (-1.0, 1.0)))
    if bad.size:
        i, j = bad[0]
        raise InputError(f"patterns[{i}][{j}]: entry {arr[i, j]:g} is not +1 or -1 (set \"lenient\": true for real data)")
    return PatternSet(arr)


def load_batch(path) -> TrainingBatch:
    doc = _load_json(path)
    t_data = _t_data(doc)
    if "patterns" in doc:
        return encode_batch(patterns_from_doc(doc), t_data)
    if "states" not in doc:
        raise InputError("states: missing (need \"states\" or \"patterns\")")
    n = doc.get("n_qubits")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("n_qubits: must be a positive integer")
    raw = doc["states"]
    if not isinstance(raw, list):
        raise InputError("states: must be a list")
    if not raw:
        raise InputError("states: empty batch")
    states = []
    for i, s in enumerate(raw):
        psi = parse_amplitudes(s, f"states[{i}]")
        if psi.size != 1 << n:
            raise InputError(f"states[{i}]: {psi.size} amplitudes do not match n_qubits={n}")
        norm = np.linalg.norm(psi)
        if abs(norm - 1) > 1e-6:
            raise InputError(f"states[{i}]: norm {norm:.6g} is not 1")
        states.append(psi / norm)
    return TrainingBatch(tuple(states), t_data)


def batch_to_doc(batch: TrainingBatch) -> dict:
    doc = {"n_qubits": batch.N,
           "states": [[[float(a.real), float(a.imag)] for a in s] for s in batch.states]}
    if batch.t_data is not None:
        doc["t_data"] = batch.t_data
    return doc


def save_batch(batch: TrainingBatch, path) -> None:
    Path(path).write_text(json.dumps(batch_to_doc(batch), indent=1) + "\n")


def parse_state_spec(spec: str, batch: TrainingBatch) -> np.ndarray:
    """``basis:i``, ``eig:i`` (i-th eigenvector of rho, largest eigenvalue first),
    ``amps:a0,a1,...`` (real amplitudes, normalized), or a JSON file of ``[re, im]`` pairs."""
    d = 1 << batch.N
    kind, _, arg = spec.partition(":")
    try:
        if kind == "basis":
            i = int(arg)
            if not 0 <= i < d:
                raise InputError(f"input: basis index {i} out of range for d={d}")
            return basis_state(i, batch.N)
        if kind == "eig":
            i = int(arg)
            if not 0 <= i < d:
                raise InputError(f"input: eigenvector index {i} out of range for d={d}")
            _, vecs = np.linalg.eigh(ensemble_state(batch))
            return vecs[:, ::-1][:, i].astype(complex)
        if kind == "amps":
            a = np.array([float(v) for v in arg.split(",")], dtype=complex)
        else:
            p = Path(spec)
            if not p.exists():
                raise InputError(f"input: {spec!r} is neither a state spec nor a file")
            raw = json.loads(p.read_text())
            a = parse_amplitudes(raw.get("state") if isinstance(raw, dict) else raw, "input")
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"input: cannot parse {spec!r}") from exc
    if a.size != d:
        raise InputError(f"input: {a.size} amplitudes do not match N={batch.N}")
    norm = np.linalg.norm(a)
    if norm == 0:
        raise InputError("input: zero vector")
    return a / norm
