"""Mixed-dimension circuit IR with canonical JSON parsing and serialization.

A circuit is an ordered list of gates acting on one or two wires.  Each wire
carries a dimension (2 for qubits, 4 for ququarts, ...).  Every gate kind
resolves to a concrete unitary through :func:`gate_matrix`.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np

UNITARY_TOL = 1e-10
MAX_TOTAL_DIM = 2**16

QUBIT_ONLY_1Q = ("T", "Tdag", "RX", "RY")
QUBIT_ONLY_2Q = ("CNOT", "CZ", "CT", "CTdag")
GATE_KINDS = (
    "H", "X", "Z", "T", "Tdag", "RX", "RY", "phase", "permutation",
    "CNOT", "CZ", "CT", "CTdag", "controlled-on-level", "custom-matrix",
)
TWO_WIRE_KINDS = frozenset(QUBIT_ONLY_2Q + ("controlled-on-level",))
ONE_WIRE_KINDS = frozenset(("H", "X", "Z", "phase", "permutation") + QUBIT_ONLY_1Q)


class CircuitError(ValueError):
    """Base class for circuit document errors."""

    def __init__(self, message: str, gate_index: int | None = None):
        self.gate_index = gate_index
        if gate_index is not None:
            message = f"gate {gate_index}: {message}"
        super().__init__(message)


class CircuitSyntaxError(CircuitError):
    pass


class CircuitSchemaError(CircuitError):
    pass


class CircuitSemanticError(CircuitError):
    pass


@dataclass(frozen=True)
class WireSpec:
    index: int
    dim: int = 2


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    wires: tuple[int, ...]
    params: tuple[float, ...] = ()
    control_level: int | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @property
    def is_nonlocal(self) -> bool:
        return len(self.wires) == 2

    # the matrix is read-only, so both are computed once per gate
    @cached_property
    def matrix_error(self) -> float:
        return 0.0 if self.matrix is None else unitarity_error(self.matrix, self.monomial)

    @cached_property
    def monomial(self) -> tuple[np.ndarray, np.ndarray] | None:
        return None if self.matrix is None else monomial_form(self.matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.wires, self.params, self.control_level) != (
            other.kind, other.wires, other.params, other.control_level
        ):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is None and other.matrix is None
        return np.array_equal(self.matrix, other.matrix)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        extra = f", level={self.control_level}" if self.control_level is not None else ""
        return f"Gate({self.kind!r}, {self.wires}{extra})"


@dataclass(frozen=True)
class Circuit:
    """Validated, immutable circuit over wires of declared dimensions."""

    wires: tuple[WireSpec, ...]
    gates: tuple[Gate, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(self.wires))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "metadata", dict(self.metadata))
        validate_circuit(self)

    @classmethod
    def qubits(cls, n: int, gates: Sequence[Gate] = (), metadata: Mapping[str, Any] | None = None) -> Circuit:
        return cls(tuple(WireSpec(i, 2) for i in range(n)), tuple(gates), metadata or {})

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(w.dim for w in self.wires)

    @property
    def n_wires(self) -> int:
        return len(self.wires)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def is_all_qubit(self) -> bool:
        return all(d == 2 for d in self.dims)

    def with_gates(self, gates: Sequence[Gate], metadata: Mapping[str, Any] | None = None) -> Circuit:
        return Circuit(self.wires, tuple(gates), self.metadata if metadata is None else metadata)


# -- gate matrices -----------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_T = np.diag([1, np.exp(1j * np.pi / 4)])


def _controlled(target: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = target
    return out


def _single_wire_matrix(gate: Gate, d: int) -> np.ndarray:
    kind, p = gate.kind, gate.params
    if kind in QUBIT_ONLY_1Q and d != 2:
        raise CircuitSemanticError(f"{kind} requires a qubit wire, got dim {d}")
    if kind == "H":
        # generalized Hadamard (discrete Fourier transform); ordinary H at d=2
        n = np.arange(d)
        return np.exp(2j * np.pi * np.outer(n, n) / d) / np.sqrt(d)
    if kind == "X":
        return np.roll(np.eye(d, dtype=complex), 1, axis=0)
    if kind == "Z":
        return np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    if kind == "T":
        return _T.copy()
    if kind == "Tdag":
        return _T.conj()
    if kind in ("RX", "RY"):
        if len(p) != 1:
            raise CircuitSemanticError(f"{kind} takes one angle")
        c, s = np.cos(p[0] / 2), np.sin(p[0] / 2)
        if kind == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]])
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "phase":
        if len(p) == 1:
            phases = np.zeros(d)
            phases[-1] = p[0]
        elif len(p) == d:
            phases = np.asarray(p)
        else:
            raise CircuitSemanticError(f"phase takes 1 or {d} angles, got {len(p)}")
        return np.diag(np.exp(1j * phases))
    if kind == "permutation":
        image = [int(x) for x in p]
        if len(image) != d or sorted(image) != list(range(d)) or any(x != int(x) for x in p):
            raise CircuitSemanticError(f"permutation params must permute 0..{d - 1}")
        out = np.zeros((d, d), dtype=complex)
        out[image, np.arange(d)] = 1
        return out
    raise CircuitSemanticError(f"{kind} is not a single-wire kind")


def _two_wire_matrix(gate: Gate, dc: int, dt: int) -> np.ndarray:
    kind = gate.kind
    if kind in QUBIT_ONLY_2Q:
        if (dc, dt) != (2, 2):
            raise CircuitSemanticError(f"{kind} requires two qubit wires")
        if kind == "CNOT":
            return _controlled(np.array([[0, 1], [1, 0]], dtype=complex))
        if kind == "CZ":
            return np.diag([1, 1, 1, -1]).astype(complex)
        if kind == "CT":
            return _controlled(_T)
        return _controlled(_T.conj())
    if kind == "controlled-on-level":
        # phase on the target's top level iff the control sits on control_level
        level = gate.control_level
        if level is None or not 0 <= level < dc:
            raise CircuitSemanticError(f"control_level {level} invalid for control dim {dc}")
        if len(gate.params) > 1:
            raise CircuitSemanticError("controlled-on-level takes at most one phase")
        phi = gate.params[0] if gate.params else np.pi
        diag = np.ones(dc * dt, dtype=complex)
        diag[level * dt + dt - 1] = np.exp(1j * phi)
        return np.diag(diag)
    raise CircuitSemanticError(f"{kind} is not a two-wire kind")


def gate_matrix(gate: Gate, dims: Sequence[int]) -> np.ndarray:
    """Unitary of ``gate`` on its own wires, first listed wire most significant."""
    wdims = [dims[w] for w in gate.wires]
    if gate.kind == "custom-matrix":
        if gate.matrix is None:
            raise CircuitSemanticError("custom-matrix gate without matrix")
        size = math.prod(wdims)
        if gate.matrix.shape != (size, size):
            raise CircuitSemanticError(f"matrix shape {gate.matrix.shape} does not match wire dims {wdims}")
        return gate.matrix
    if len(wdims) == 1:
        return _single_wire_matrix(gate, wdims[0])
    return _two_wire_matrix(gate, *wdims)


def monomial_form(m: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """(column of the nonzero, its value) per row, if ``m`` has one nonzero per row and column."""
    n = m.shape[0]
    if np.count_nonzero(m) != n:
        return None
    rows, cols = np.nonzero(m)
    if len(rows) != n or not np.array_equal(rows, np.arange(n)) or len(np.unique(cols)) != n:
        return None
    return cols, m[rows, cols]


def unitarity_error(m: np.ndarray, mono: tuple[np.ndarray, np.ndarray] | None = None) -> float:
    if mono is None:
        mono = monomial_form(m)
    if mono is not None:
        # one entry per row and column: unitary iff every entry is a phase
        return float(np.max(np.abs(np.abs(mono[1]) - 1)))
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1] and unitarity_error(m) < tol


# -- validation ----------------------------------------------------------------


def validate_circuit(c: Circuit) -> None:
    for i, w in enumerate(c.wires):
        if w.index != i:
            raise CircuitSemanticError(f"wire indices must be 0..n-1 in order, got {w.index} at position {i}")
        if w.dim < 2:
            raise CircuitSemanticError(f"wire {i} has dim {w.dim} < 2")
    if c.total_dim > MAX_TOTAL_DIM:
        raise CircuitSemanticError(f"total dimension {c.total_dim} exceeds {MAX_TOTAL_DIM}")
    dims = c.dims
    for gi, g in enumerate(c.gates):
        if g.kind not in GATE_KINDS:
            raise CircuitSemanticError(f"unknown gate kind {g.kind!r}", gi)
        if len(g.wires) not in (1, 2):
            raise CircuitSemanticError("gates act on one or two wires", gi)
        if len(set(g.wires)) != len(g.wires):
            raise CircuitSemanticError(f"duplicate wire in {list(g.wires)}", gi)
        for w in g.wires:
            if not 0 <= w < len(dims):
                raise CircuitSemanticError(f"wire {w} not declared", gi)
        if g.kind in TWO_WIRE_KINDS and len(g.wires) != 2:
            raise CircuitSemanticError(f"{g.kind} needs two wires", gi)
        if g.kind in ONE_WIRE_KINDS and len(g.wires) != 1:
            raise CircuitSemanticError(f"{g.kind} needs one wire", gi)
        if (g.matrix is not None) != (g.kind == "custom-matrix"):
            raise CircuitSemanticError("matrix is required iff kind is custom-matrix", gi)
        if g.control_level is not None and g.kind != "controlled-on-level":
            raise CircuitSemanticError("control_level only applies to controlled-on-level", gi)
        try:
            m = gate_matrix(g, dims)
        except CircuitSemanticError as exc:
            raise CircuitSemanticError(str(exc), gi) from None
        if g.kind == "custom-matrix" and not g.matrix_error < UNITARY_TOL:
            raise CircuitSemanticError(f"matrix is not unitary (error {g.matrix_error:.3e})", gi)


# -- statistics ----------------------------------------------------------------


@dataclass(frozen=True)
class CircuitStats:
    n_wires: int
    n_local: int
    n_nonlocal: int
    pair_counts: dict[tuple[int, int], int]


def circuit_stats(c: Circuit) -> CircuitStats:
    pairs: Counter[tuple[int, int]] = Counter()
    for g in c.gates:
        if g.is_nonlocal:
            u, v = sorted(g.wires)
            pairs[(u, v)] += 1
    n_nonlocal = sum(pairs.values())
    return CircuitStats(c.n_wires, len(c.gates) - n_nonlocal, n_nonlocal, dict(sorted(pairs.items())))


def nonlocal_count(c: Circuit) -> int:
    return sum(1 for g in c.gates if g.is_nonlocal)


# -- JSON ----------------------------------------------------------------------

_TOP_KEYS = {"wires", "gates", "metadata"}
_WIRE_KEYS = {"index", "dim"}
_GATE_KEYS = {"kind", "wires", "params", "control_level", "matrix"}


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    """Row-major matrix of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(doc: Any, gate_index: int | None = None) -> np.ndarray:
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise CircuitSchemaError("matrix must be a non-empty list of rows", gate_index)
    n = len(doc)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(doc):
        if len(row) != n:
            raise CircuitSchemaError("matrix must be square", gate_index)
        for j, z in enumerate(row):
            if not (isinstance(z, list) and len(z) == 2 and all(_is_number(x) for x in z)):
                raise CircuitSchemaError(f"matrix entry ({i},{j}) must be [re, im]", gate_index)
            out[i, j] = complex(z[0], z[1])
    return out


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def circuit_to_dict(c: Circuit) -> dict[str, Any]:
    return {
        "wires": [{"index": w.index, "dim": w.dim} for w in c.wires],
        "gates": [
            {
                "kind": g.kind,
                "wires": list(g.wires),
                "params": list(g.params),
                "control_level": g.control_level,
                "matrix": None if g.matrix is None else matrix_to_json(g.matrix),
            }
            for g in c.gates
        ],
        "metadata": dict(c.metadata),
    }


def serialize_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), sort_keys=True, indent=1) + "\n"


def _parse_gate(doc: Any, gi: int) -> Gate:
    if not isinstance(doc, dict):
        raise CircuitSchemaError("gate must be an object", gi)
    unknown = set(doc) - _GATE_KEYS
    if unknown:
        raise CircuitSchemaError(f"unknown keys {sorted(unknown)}", gi)
    if "kind" not in doc or "wires" not in doc:
        raise CircuitSchemaError("gate needs 'kind' and 'wires'", gi)
    kind, wires = doc["kind"], doc["wires"]
    if not isinstance(kind, str):
        raise CircuitSchemaError("kind must be a string", gi)
    if not isinstance(wires, list) or not all(_is_int(w) for w in wires):
        raise CircuitSchemaError("wires must be a list of integers", gi)
    params = doc.get("params", [])
    if not isinstance(params, list) or not all(_is_number(p) for p in params):
        raise CircuitSchemaError("params must be a list of numbers", gi)
    level = doc.get("control_level")
    if level is not None and not _is_int(level):
        raise CircuitSchemaError("control_level must be an integer or null", gi)
    matrix = doc.get("matrix")
    if matrix is not None:
        matrix = matrix_from_json(matrix, gi)
    return Gate(kind, tuple(wires), tuple(params), level, matrix)


def circuit_from_dict(doc: Any) -> Circuit:
    if not isinstance(doc, dict):
        raise CircuitSchemaError("top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise CircuitSchemaError(f"unknown top-level keys {sorted(unknown)}")
    if "wires" not in doc or "gates" not in doc:
        raise CircuitSchemaError("document needs 'wires' and 'gates'")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise CircuitSchemaError("metadata must be an object")
    if not isinstance(doc["wires"], list):
        raise CircuitSchemaError("wires must be a list")
    wires = []
    for w in doc["wires"]:
        if not isinstance(w, dict) or set(w) != _WIRE_KEYS or not all(_is_int(w[k]) for k in _WIRE_KEYS):
            raise CircuitSchemaError(f"wire entry {w!r} must be {{'index': int, 'dim': int}}")
        wires.append(WireSpec(w["index"], w["dim"]))
    if not isinstance(doc["gates"], list):
        raise CircuitSchemaError("gates must be a list")
    gates = [_parse_gate(g, i) for i, g in enumerate(doc["gates"])]
    return Circuit(tuple(wires), tuple(gates), metadata)


def parse_circuit(text: str) -> Circuit:
    """Parse and validate a canonical JSON circuit document.

    Raises :class:`CircuitSyntaxError` for malformed JSON,
    :class:`CircuitSchemaError` for structural problems and
    :class:`CircuitSemanticError` for invalid wires or non-unitary matrices.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitSyntaxError(f"invalid JSON: {exc}") from None
    return circuit_from_dict(doc)
