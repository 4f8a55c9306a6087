"""Balanced k-way partitioning: exact enumeration and a seeded swap local search."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Iterator, Sequence

from .graph import WeightedGraph, group_lookup

MAX_ENUMERATION = 10**6
DEFAULT_RESTARTS = 16


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Disjoint vertex groups in canonical form (sorted, ordered by smallest element)."""

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted(g)) for g in self.groups))
        object.__setattr__(self, "groups", canon)
        if any(not g for g in canon):
            raise PartitionError("empty group")
        group_lookup(self.n_vertices, canon)

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def n_vertices(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def is_balanced(self) -> bool:
        return len({len(g) for g in self.groups}) == 1

    def to_json(self) -> dict[str, Any]:
        return {"groups": [list(g) for g in self.groups]}

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> Partition:
        return cls(tuple(tuple(g) for g in doc["groups"]))

    def __str__(self) -> str:
        return "|".join("".join(map(str, g)) if max(g) < 10 else ",".join(map(str, g)) for g in self.groups)


@dataclass(frozen=True)
class CutResult:
    partition: Partition
    cut_weight: int
    internal_weight: int
    optimality: str  # "exact" or "heuristic"

    def to_json(self) -> dict[str, Any]:
        return {
            "cut_weight": self.cut_weight,
            "internal_weight": self.internal_weight,
            "optimality": self.optimality,
        }


def balanced_partition_count(n: int, k: int) -> int:
    _check_divisible(n, k)
    size = n // k
    return math.factorial(n) // (math.factorial(size) ** k * math.factorial(k))


def _check_divisible(n: int, k: int) -> None:
    if k < 1 or n < 1 or n % k:
        raise PartitionError(f"cannot split {n} vertices into {k} equal groups")


def _balanced_groups(remaining: tuple[int, ...], size: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not remaining:
        yield ()
        return
    first, rest = remaining[0], remaining[1:]
    for others in combinations(rest, size - 1):
        group = (first,) + others
        left = tuple(v for v in rest if v not in others)
        for tail in _balanced_groups(left, size):
            yield (group,) + tail


def enumerate_balanced_partitions(n: int, k: int) -> list[Partition]:
    """All partitions of ``range(n)`` into ``k`` equal groups, in lexicographic canonical order."""
    count = balanced_partition_count(n, k)
    if count > MAX_ENUMERATION:
        raise PartitionError(f"{count} balanced partitions exceed the enumeration cap {MAX_ENUMERATION}")
    return [Partition(gs) for gs in _balanced_groups(tuple(range(n)), n // k)]


def cut_weight(g: WeightedGraph, groups: Sequence[Sequence[int]]) -> int:
    owner = group_lookup(g.n_vertices, groups)
    return sum(w for (u, v), w in g.edges.items() if owner[u] != owner[v])


def _result(g: WeightedGraph, p: Partition, optimality: str) -> CutResult:
    cut = cut_weight(g, p.groups)
    return CutResult(p, cut, g.total_weight - cut, optimality)


def min_cut_exact(g: WeightedGraph, k: int) -> CutResult:
    best: Partition | None = None
    best_cut = math.inf
    for p in enumerate_balanced_partitions(g.n_vertices, k):
        c = cut_weight(g, p.groups)
        if c < best_cut:  # strict: first in canonical order wins ties
            best, best_cut = p, c
    assert best is not None
    return _result(g, best, "exact")


def _local_search(n: int, adj: list[list[int]], owner: list[int]) -> int:
    """Steepest-descent pairwise swaps until no swap lowers the cut; returns the cut."""
    while True:
        best_gain, best_pair = 0, None
        for u in range(n):
            for v in range(u + 1, n):
                a, b = owner[u], owner[v]
                if a == b:
                    continue
                # gain of moving u to b and v to a
                gain = 0
                for x in range(n):
                    if x == u or x == v:
                        continue
                    ox = owner[x]
                    gain += adj[u][x] * ((ox == b) - (ox == a)) + adj[v][x] * ((ox == a) - (ox == b))
                if gain > best_gain:
                    best_gain, best_pair = gain, (u, v)
        if best_pair is None:
            break
        u, v = best_pair
        owner[u], owner[v] = owner[v], owner[u]
    return sum(adj[u][v] for u in range(n) for v in range(u + 1, n) if owner[u] != owner[v])


def min_cut_heuristic(g: WeightedGraph, k: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> CutResult:
    """Best of ``restarts`` seeded random balanced starts refined by pairwise swaps."""
    n = g.n_vertices
    _check_divisible(n, k)
    size = n // k
    adj = [[0] * n for _ in range(n)]
    for (u, v), w in g.edges.items():
        adj[u][v] = adj[v][u] = w
    rng = random.Random(seed)
    best: tuple[int, tuple] | None = None
    for _ in range(restarts):
        order = list(range(n))
        rng.shuffle(order)
        owner = [0] * n
        for pos, v in enumerate(order):
            owner[v] = pos // size
        cut = _local_search(n, adj, owner)
        groups = Partition(tuple(tuple(v for v in range(n) if owner[v] == gi) for gi in range(k))).groups
        key = (cut, groups)
        if best is None or key < best:
            best = key
    assert best is not None
    return _result(g, Partition(best[1]), "heuristic")


def min_cut(g: WeightedGraph, k: int, method: str = "auto", seed: int = 0) -> CutResult:
    """Exact when enumeration is within the cap (or forced), heuristic otherwise."""
    if method not in ("auto", "exact", "heuristic"):
        raise PartitionError(f"unknown method {method!r}")
    if method == "heuristic":
        return min_cut_heuristic(g, k, seed)
    if method == "exact" or balanced_partition_count(g.n_vertices, k) <= MAX_ENUMERATION:
        return min_cut_exact(g, k)
    return min_cut_heuristic(g, k, seed)
