"""Weighted interaction graphs of circuits and their contraction under a partition."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .circuit import Circuit


class GraphError(ValueError):
    pass


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _normalize_edges(n: int, edges: Mapping[tuple[int, int], int]) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for (u, v), w in edges.items():
        if u == v:
            raise GraphError(f"self-loop on vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) outside 0..{n - 1}")
        if int(w) != w or w < 1:
            raise GraphError(f"edge ({u}, {v}) has weight {w}; weights are positive integers")
        key = _edge_key(u, v)
        if key in out:
            raise GraphError(f"duplicate edge {key}")
        out[key] = int(w)
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class WeightedGraph:
    n_vertices: int
    edges: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "edges", _normalize_edges(self.n_vertices, self.edges))

    @property
    def total_weight(self) -> int:
        return sum(self.edges.values())

    @property
    def weights(self) -> list[int]:
        return list(self.edges.values())

    def scaled(self, factor: int) -> WeightedGraph:
        return WeightedGraph(self.n_vertices, {e: w * factor for e, w in self.edges.items()})

    def to_json(self) -> dict[str, Any]:
        return graph_to_json(self.n_vertices, self.edges)


@dataclass(frozen=True)
class ContractedGraph:
    n_qudits: int
    edges: dict[tuple[int, int], int]
    dropped_weight: int

    @property
    def l0(self) -> int:
        return len(self.edges)

    @property
    def l1(self) -> int:
        return sum(self.edges.values())

    def to_json(self) -> dict[str, Any]:
        doc = graph_to_json(self.n_qudits, self.edges)
        doc["dropped"] = self.dropped_weight
        return doc


def graph_to_json(n: int, edges: Mapping[tuple[int, int], int]) -> dict[str, Any]:
    return {"n": n, "edges": [{"u": u, "v": v, "w": w} for (u, v), w in sorted(edges.items())]}


def graph_from_json(doc: Mapping[str, Any]) -> WeightedGraph:
    return WeightedGraph(doc["n"], {(e["u"], e["v"]): e["w"] for e in doc["edges"]})


def build_interaction_graph(c: Circuit) -> WeightedGraph:
    """One vertex per wire, edge weight = number of two-wire gates on that pair."""
    if not c.is_all_qubit():
        raise GraphError("interaction graphs are built from all-qubit circuits")
    counts: Counter[tuple[int, int]] = Counter(_edge_key(*g.wires) for g in c.gates if g.is_nonlocal)
    return WeightedGraph(c.n_wires, dict(counts))


def group_lookup(n: int, groups: Iterable[Sequence[int]]) -> list[int]:
    """Map vertex -> group index, checking the groups partition 0..n-1."""
    owner = [-1] * n
    for gi, group in enumerate(groups):
        for v in group:
            if not 0 <= v < n:
                raise GraphError(f"vertex {v} outside 0..{n - 1}")
            if owner[v] != -1:
                raise GraphError(f"vertex {v} appears in more than one group")
            owner[v] = gi
    missing = [v for v, o in enumerate(owner) if o == -1]
    if missing:
        raise GraphError(f"vertices {missing} not covered by the partition")
    return owner


def contract_graph(g: WeightedGraph, partition: Any) -> ContractedGraph:
    """Drop intra-group weight and sum inter-group weights per qudit pair.

    ``partition`` is a :class:`~qudit_compress.partition.Partition` or a plain
    sequence of vertex groups.
    """
    groups = getattr(partition, "groups", partition)
    owner = group_lookup(g.n_vertices, groups)
    dropped = 0
    edges: Counter[tuple[int, int]] = Counter()
    for (u, v), w in g.edges.items():
        a, b = owner[u], owner[v]
        if a == b:
            dropped += w
        else:
            edges[_edge_key(a, b)] += w
    return ContractedGraph(len(groups), dict(sorted(edges.items())), dropped)
