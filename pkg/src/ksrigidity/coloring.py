"""KS colourings: exhaustive search with unit propagation, and criticality.

A KS colouring assigns 0/1 to every vertex so that no edge carries two 1s
and every basis carries exactly one 1.  Given the edge rule, "exactly one"
and "at least one" per basis are the same condition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .graph import Basis, OrthoGraph


class Result(enum.Enum):
    COLOURABLE = "COLOURABLE"
    UNCOLOURABLE = "UNCOLOURABLE"


@dataclass(frozen=True)
class Coloring:
    values: tuple[int, ...]


@dataclass
class SearchStats:
    nodes_explored: int = 0
    propagations: int = 0
    result: Result | None = None


def is_valid_coloring(graph: OrthoGraph, bases: Sequence[Basis], values: Sequence[int]) -> bool:
    if len(values) != graph.n_vertices or any(v not in (0, 1) for v in values):
        return False
    if any(values[i] + values[j] > 1 for i, j in graph.edges):
        return False
    return all(sum(values[v] for v in b) == 1 for b in bases)


def _check_bases(graph: OrthoGraph, bases: Sequence[Basis]):
    for b in bases:
        vs = b.vertices
        if any(not (0 <= v < graph.n_vertices) for v in vs):
            raise InputError(f"basis {vs} has vertices outside the graph")
        if any(not graph.has_edge(vs[a], vs[c]) for a in range(len(vs)) for c in range(a + 1, len(vs))):
            raise InputError(f"basis {vs} is not a clique of the graph")


class _Search:
    def __init__(self, graph: OrthoGraph, bases: Sequence[Basis]):
        self.n = graph.n_vertices
        self.adj = [sorted(a) for a in graph.adjacency]
        self.bases = [b.vertices for b in bases]
        self.member = [[] for _ in range(self.n)]
        for k, b in enumerate(self.bases):
            for v in b:
                self.member[v].append(k)
        self.stats = SearchStats()

    def assign(self, vals: list[int], v: int, x: int) -> bool:
        """Set vals[v] = x and propagate; False on conflict."""
        queue = [(v, x)]
        while queue:
            v, x = queue.pop()
            if vals[v] == x:
                continue
            if vals[v] != -1:
                return False
            vals[v] = x
            self.stats.propagations += 1
            if x == 1:
                for u in self.adj[v]:
                    if vals[u] == 1:
                        return False
                    if vals[u] == -1:
                        queue.append((u, 0))
            for k in self.member[v]:
                ones = 0
                free = []
                for u in self.bases[k]:
                    if vals[u] == 1:
                        ones += 1
                    elif vals[u] == -1:
                        free.append(u)
                if ones > 1 or (ones == 0 and not free):
                    return False
                if ones == 0 and len(free) == 1:
                    queue.append((free[0], 1))
        return True

    def branch_vertex(self, vals: list[int]) -> int | None:
        """Unassigned vertex lying in the most unresolved bases."""
        counts = [0] * self.n
        any_open = False
        for b in self.bases:
            if any(vals[u] == 1 for u in b):
                continue
            any_open = True
            for u in b:
                if vals[u] == -1:
                    counts[u] += 1
        if not any_open:
            return None
        best = max(range(self.n), key=lambda u: (counts[u], -u))
        return best

    def run(self, vals: list[int]) -> list[int] | None:
        self.stats.nodes_explored += 1
        v = self.branch_vertex(vals)
        if v is None:
            # every basis already holds its 1; the rest can be 0
            return [0 if x == -1 else x for x in vals]
        for x in (1, 0):
            trial = list(vals)
            if self.assign(trial, v, x):
                found = self.run(trial)
                if found is not None:
                    return found
        return None


def find_ks_coloring(graph: OrthoGraph, bases: Sequence[Basis]) -> tuple[Coloring | None, SearchStats]:
    """Complete search for a KS colouring.

    Returns the colouring (or None) and search statistics; None means the
    search exhausted every branch, i.e. the instance is uncolourable.
    """
    _check_bases(graph, bases)
    s = _Search(graph, bases)
    found = s.run([-1] * graph.n_vertices)
    if found is None:
        s.stats.result = Result.UNCOLOURABLE
        return None, s.stats
    if not is_valid_coloring(graph, bases, found):  # pragma: no cover - internal invariant
        raise AssertionError("search produced an invalid colouring")
    s.stats.result = Result.COLOURABLE
    return Coloring(tuple(found)), s.stats


def delete_vertex(graph: OrthoGraph, bases: Sequence[Basis], v: int) -> tuple[OrthoGraph, list[Basis]]:
    """Drop vertex v, its edges and every basis through it; renumber the rest."""
    keep = [u for u in range(graph.n_vertices) if u != v]
    index = {u: k for k, u in enumerate(keep)}
    sub = graph.induced(keep)
    sub_bases = [Basis(tuple(index[u] for u in b)) for b in bases if v not in b.vertices]
    return sub, sub_bases


@dataclass(frozen=True)
class CriticalityReport:
    per_vertex: tuple[Result, ...]

    @property
    def critical(self) -> bool:
        return all(r is Result.COLOURABLE for r in self.per_vertex)

    @property
    def surviving_deletions(self) -> list[int]:
        """Vertices whose removal leaves the set uncolourable."""
        return [v for v, r in enumerate(self.per_vertex) if r is Result.UNCOLOURABLE]


def check_critical(graph: OrthoGraph, bases: Sequence[Basis]) -> CriticalityReport:
    coloring, _ = find_ks_coloring(graph, bases)
    if coloring is not None:
        raise InputError("set is colourable, so criticality is undefined")
    results = []
    for v in range(graph.n_vertices):
        sub, sub_bases = delete_vertex(graph, bases, v)
        _, stats = find_ks_coloring(sub, sub_bases)
        results.append(stats.result)
    return CriticalityReport(tuple(results))
