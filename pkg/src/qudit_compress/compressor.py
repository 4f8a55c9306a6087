"""Qubit-to-qudit compression: encodings, embedded gates, the merge pass and ratio bounds."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .circuit import Circuit, Gate, WireSpec, gate_matrix, monomial_form, nonlocal_count
from .graph import (
    ContractedGraph,
    WeightedGraph,
    build_interaction_graph,
    contract_graph,
    graph_to_json,
    group_lookup,
)
from .partition import CutResult, Partition, min_cut
from .simulator import MAX_SIM_DIM, operator_schmidt_rank, verify_circuits

log = logging.getLogger(__name__)

DIAGONAL_TOL = 1e-12


class CompressionError(ValueError):
    pass


class DegenerateBoundsError(CompressionError):
    """Raised when the circuit has no non-local gates to normalize by."""


# -- encodings -----------------------------------------------------------------


@dataclass(frozen=True)
class Encoding:
    """Qubit groups mapped into qudits with big-endian binary order inside each group."""

    groups: tuple[tuple[int, ...], ...]
    qudit_dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(tuple(g) for g in self.groups))
        object.__setattr__(self, "qudit_dims", tuple(int(d) for d in self.qudit_dims))
        if len(self.groups) != len(self.qudit_dims):
            raise CompressionError("one dimension per group required")
        group_lookup(self.n_qubits, self.groups)
        for g, d in zip(self.groups, self.qudit_dims):
            if d < 2 ** len(g):
                raise CompressionError(f"dimension {d} too small for group {list(g)}")

    @property
    def n_qubits(self) -> int:
        return sum(len(g) for g in self.groups)

    def locate(self, qubit: int) -> tuple[int, int]:
        """(qudit index, position within the group) of ``qubit``."""
        for gi, g in enumerate(self.groups):
            if qubit in g:
                return gi, g.index(qubit)
        raise CompressionError(f"qubit {qubit} not encoded")

    def basis_map(self, group: int, bits: Sequence[int]) -> int:
        m = len(self.groups[group])
        return sum(b << (m - 1 - i) for i, b in enumerate(bits))

    def qudit_index(self, x: int) -> int:
        """Register index of the qudit basis state encoding qubit basis state ``x``."""
        n = self.n_qubits
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        idx = 0
        for gi, (g, d) in enumerate(zip(self.groups, self.qudit_dims)):
            idx = idx * d + self.basis_map(gi, [bits[q] for q in g])
        return idx

    def to_json(self) -> dict[str, Any]:
        return {"groups": [list(g) for g in self.groups], "dims": list(self.qudit_dims)}

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> Encoding:
        return cls(tuple(tuple(g) for g in doc["groups"]), tuple(doc["dims"]))


def make_encoding(p: Partition | Sequence[Sequence[int]], dims: Sequence[int] | None = None) -> Encoding:
    groups = p.groups if isinstance(p, Partition) else Partition(tuple(tuple(g) for g in p)).groups
    if dims is None:
        dims = [2 ** len(g) for g in groups]
    if len(dims) != len(groups):
        raise CompressionError(f"{len(dims)} dimensions given for {len(groups)} groups")
    return Encoding(groups, tuple(dims))


# -- embedded gates ------------------------------------------------------------


def qubit_operator(u: np.ndarray, positions: Sequence[int], m: int) -> np.ndarray:
    """``u`` acting on qubits ``positions`` of an m-qubit register (qubit 0 most significant)."""
    k = len(positions)
    others = [q for q in range(m) if q not in positions]
    full = np.kron(u, np.eye(2 ** (m - k))).reshape((2,) * (2 * m))
    order = list(positions) + others
    perm = [order.index(q) for q in range(m)]
    full = full.transpose(perm + [m + a for a in perm])
    return full.reshape(2**m, 2**m)


def _pad_levels(u: np.ndarray, inner: Sequence[int], outer: Sequence[int]) -> np.ndarray:
    """Extend ``u`` on dims ``inner`` to dims ``outer``, identity outside the embedded levels."""
    if tuple(inner) == tuple(outer):
        return u
    iso = np.ones((1, 1))
    for a, b in zip(inner, outer):
        iso = np.kron(iso, np.eye(b, a))
    return iso @ u @ iso.T + np.eye(iso.shape[0]) - iso @ iso.T


def embed_two_qubit_gate(u: np.ndarray, pos_a: int, m_a: int, pos_b: int, m_b: int) -> np.ndarray:
    """Two-qubit ``u`` on qubit ``pos_a`` of qudit A and ``pos_b`` of qudit B.

    Acts identically on every spectator subspace, in the canonical qudit bases
    of dimensions ``2**m_a`` and ``2**m_b``.
    """
    if not (0 <= pos_a < m_a and 0 <= pos_b < m_b):
        raise CompressionError("qubit position outside its group")
    return qubit_operator(np.asarray(u, dtype=complex), [pos_a, m_a + pos_b], m_a + m_b)


def compress(c: Circuit, e: Encoding) -> Circuit:
    """Rewrite an all-qubit circuit onto the qudits of ``e``, gate by gate in order."""
    if not c.is_all_qubit():
        raise CompressionError("compress expects an all-qubit circuit")
    if e.n_qubits != c.n_wires:
        raise CompressionError(f"encoding covers {e.n_qubits} qubits, circuit has {c.n_wires}")
    dims = c.dims
    gates = []
    for g in c.gates:
        u = gate_matrix(g, dims)
        where = [e.locate(q) for q in g.wires]
        qudits = [q for q, _ in where]
        if len(set(qudits)) == 1:
            qd = qudits[0]
            m = len(e.groups[qd])
            local = qubit_operator(u, [pos for _, pos in where], m)
            mat = _pad_levels(local, [2**m], [e.qudit_dims[qd]])
            gates.append(Gate("custom-matrix", (qd,), matrix=mat))
        else:
            (qa, pa), (qb, pb) = where
            ma, mb = len(e.groups[qa]), len(e.groups[qb])
            mat = embed_two_qubit_gate(u, pa, ma, pb, mb)
            mat = _pad_levels(mat, [2**ma, 2**mb], [e.qudit_dims[qa], e.qudit_dims[qb]])
            gates.append(Gate("custom-matrix", (qa, qb), matrix=mat))
    wires = tuple(WireSpec(i, d) for i, d in enumerate(e.qudit_dims))
    meta = dict(c.metadata)
    meta["encoding"] = e.to_json()
    return Circuit(wires, tuple(gates), meta)


# -- merge pass ----------------------------------------------------------------


def _is_diagonal(m: np.ndarray) -> bool:
    off = m.copy()
    np.fill_diagonal(off, 0)
    return bool(np.max(np.abs(off)) <= DIAGONAL_TOL)


@dataclass(frozen=True)
class _Op:
    gate: Gate
    matrix: np.ndarray
    diagonal: bool

    @classmethod
    def of(cls, gate: Gate, dims: Sequence[int]) -> _Op:
        m = gate_matrix(gate, dims)
        mono = gate.monomial if gate.matrix is not None else monomial_form(m)
        diagonal = mono is not None and np.array_equal(mono[0], np.arange(len(mono[0])))
        return cls(gate, m, diagonal or (mono is None and _is_diagonal(m)))

    @property
    def wires(self) -> tuple[int, ...]:
        return self.gate.wires

    def commutes_with(self, other: _Op) -> bool:
        if not set(self.wires) & set(other.wires):
            return True
        return self.diagonal and other.diagonal


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a @ b``, by gather-and-scale when either factor is monomial."""
    mono = monomial_form(a)
    if mono is not None:
        cols, vals = mono
        out = b[cols].astype(np.result_type(a, b), copy=False)
        out *= vals[:, None]
        return out
    mono = monomial_form(b)
    if mono is not None:
        cols, vals = mono
        out = np.empty_like(a, dtype=np.result_type(a, b))
        out[:, cols] = a * vals
        return out
    return a @ b


def _lift(m: np.ndarray, wires: tuple[int, ...], pair: tuple[int, int], dims: Sequence[int]) -> np.ndarray:
    """Express a gate on ``wires`` (a subset of ``pair``) as a matrix on ``pair``."""
    da, db = dims[pair[0]], dims[pair[1]]
    if wires == pair:
        return m
    if wires == (pair[1], pair[0]):
        return m.reshape(db, da, db, da).transpose(1, 0, 3, 2).reshape(da * db, da * db)
    if wires == (pair[0],):
        return np.kron(m, np.eye(db))
    return np.kron(np.eye(da), m)


def _absorb_scan(ops: list[_Op], i: int, dims: Sequence[int], absorb_local: bool, forward: bool) -> list[_Op] | None:
    """Fold into op ``i`` every later (earlier) op on its wire pair that commutes into place.

    Single-wire ops are folded only when a two-wire op is folded beyond them,
    unless ``absorb_local``.  Returns the new list, or ``None`` if nothing changed.
    """
    pair = ops[i].wires
    support = set(pair)
    cur = ops[i].matrix
    cur_diagonal = ops[i].diagonal
    skipped: list[_Op] = []
    taken: list[int] = []
    committed, committed_mat = 0, cur
    steps = range(i + 1, len(ops)) if forward else range(i - 1, -1, -1)
    for j in steps:
        op = ops[j]
        if support.issuperset(op.wires) and all(op.commutes_with(s) for s in skipped):
            lifted = _lift(op.matrix, op.wires, pair, dims)
            if cur_diagonal and op.diagonal:
                cur = np.diag(np.diag(lifted) * np.diag(cur))
            else:
                cur = _product(lifted, cur) if forward else _product(cur, lifted)
                cur_diagonal = False
            taken.append(j)
            if op.gate.is_nonlocal or absorb_local:
                committed, committed_mat = len(taken), cur
        elif not support.isdisjoint(op.wires):
            # ops off the pair commute with anything folded into it
            skipped.append(op)
    if committed == 0:
        return None
    drop = set(taken[:committed])
    merged = _Op.of(Gate("custom-matrix", pair, matrix=committed_mat), dims)
    return [merged if j == i else op for j, op in enumerate(ops) if j not in drop]


def merge_pass(c: Circuit, absorb_local: bool = False) -> Circuit:
    """Merge two-qudit gates on the same pair until no further merge applies.

    Gates are reordered only past gates on disjoint wires or when both are
    diagonal, so the circuit unitary is preserved exactly.  With
    ``absorb_local`` every single-qudit gate that can reach a two-qudit gate
    is folded into it as well.
    """
    dims = c.dims
    ops = [_Op.of(g, dims) for g in c.gates]
    directions = (True, False) if absorb_local else (True,)
    changed = True
    while changed:
        changed = False
        for forward in directions:
            i = 0
            while i < len(ops):
                if ops[i].gate.is_nonlocal:
                    new = _absorb_scan(ops, i, dims, absorb_local, forward)
                    if new is not None:
                        ops, changed = new, True
                        if not forward:
                            # folding earlier ops shifts the anchor left; rescan from the start
                            i = 0
                            continue
                i += 1
    return Circuit(c.wires, tuple(op.gate for op in ops), c.metadata)


# -- bounds and pipeline -------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    lower: Fraction
    upper: Fraction

    def to_json(self) -> dict[str, list[int]]:
        return {
            "lower": [self.lower.numerator, self.lower.denominator],
            "upper": [self.upper.numerator, self.upper.denominator],
        }


def compression_bounds(g: WeightedGraph, p: Partition | Sequence[Sequence[int]]) -> Bounds:
    """Ratio bounds l0(w~)/l1(w) <= C_d <= l1(w~)/l1(w)."""
    total = g.total_weight
    if total == 0:
        raise DegenerateBoundsError("circuit has no non-local gates; bounds are undefined")
    cg = contract_graph(g, p)
    return Bounds(Fraction(cg.l0, total), Fraction(cg.l1, total))


@dataclass
class PipelineOptions:
    merge: bool = True
    absorb_local: bool = False
    method: str = "auto"
    seed: int = 0
    tol: float = 1e-9
    verify: bool = True
    dims: Sequence[int] | None = None


@dataclass
class CompressionReport:
    original_nonlocal: int
    graph: WeightedGraph
    cut: CutResult | None
    contracted: ContractedGraph | None
    bounds: Bounds | None
    compressed_nonlocal: int | None
    merged_nonlocal: int | None
    max_residual: float | None = None
    checked: bool = False
    encoding: Encoding | None = None
    two_qudit_gates: list[dict[str, Any]] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.bounds is None

    def to_json(self) -> dict[str, Any]:
        cg = self.contracted
        return {
            "original": {"nonlocal": self.original_nonlocal, "graph": self.graph.to_json()},
            "partition": None if self.cut is None else self.cut.partition.to_json(),
            "cut": None if self.cut is None else self.cut.to_json(),
            "encoding": None if self.encoding is None else self.encoding.to_json(),
            "tilde": None if cg is None else {
                "l0": cg.l0, "l1": cg.l1, "dropped": cg.dropped_weight,
                "graph": graph_to_json(cg.n_qudits, cg.edges),
            },
            "bounds": None if self.bounds is None else self.bounds.to_json(),
            "degenerate": self.degenerate,
            "compressed_nonlocal": self.compressed_nonlocal,
            "merged_nonlocal": self.merged_nonlocal,
            "two_qudit_gates": self.two_qudit_gates,
            "verification": {"max_residual": self.max_residual, "checked": self.checked},
            "notes": list(self.notes),
        }


def analyze(c: Circuit, k: int, options: PipelineOptions | None = None) -> CompressionReport:
    """Graph, partition and bounds without rewriting the circuit."""
    options = options or PipelineOptions()
    g = build_interaction_graph(c)
    cut = min_cut(g, k, options.method, options.seed)
    cg = contract_graph(g, cut.partition)
    notes = []
    try:
        bounds: Bounds | None = compression_bounds(g, cut.partition)
    except DegenerateBoundsError as exc:
        bounds = None
        notes.append(str(exc))
    if cut.optimality == "heuristic":
        notes.append(f"partition found by swap local search (seed {options.seed}); optimality not guaranteed")
    return CompressionReport(
        original_nonlocal=g.total_weight, graph=g, cut=cut, contracted=cg, bounds=bounds,
        compressed_nonlocal=None, merged_nonlocal=None, notes=notes,
    )


def full_pipeline(c: Circuit, k: int, options: PipelineOptions | None = None) -> tuple[CompressionReport, Circuit]:
    options = options or PipelineOptions()
    report = analyze(c, k, options)
    assert report.cut is not None
    enc = make_encoding(report.cut.partition, options.dims)
    report.encoding = enc
    compressed = compress(c, enc)
    report.compressed_nonlocal = nonlocal_count(compressed)
    final = compressed
    if options.merge:
        final = merge_pass(compressed, options.absorb_local)
        report.merged_nonlocal = nonlocal_count(final)
        report.two_qudit_gates = [
            {"wires": list(g.wires),
             "schmidt_rank": operator_schmidt_rank(gate_matrix(g, final.dims), tuple(final.dims[w] for w in g.wires))}
            for g in final.gates if g.is_nonlocal
        ]
        report.notes.append("two_qudit_gates: entanglement of each gate as operator Schmidt rank across its qudit pair")
    if options.verify:
        if max(c.total_dim, final.total_dim) <= MAX_SIM_DIM:
            residuals = [verify_circuits(c, compressed, enc, options.tol).residual]
            if final is not compressed:
                residuals.append(verify_circuits(c, final, enc, options.tol).residual)
            report.max_residual = max(residuals)
            report.checked = True
        else:
            msg = f"verification skipped: dimension above {MAX_SIM_DIM}"
            log.warning(msg)
            report.notes.append(msg)
    return report, final
