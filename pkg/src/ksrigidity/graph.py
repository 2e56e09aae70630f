"""Orthogonality graphs, their complete bases, isomorphism and DOT export."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import CliqueNotBasisError, LabelError
from .rays import DEFAULT_TOL, Ray, Tolerance, ray_matrix


@dataclass(frozen=True, eq=False)
class OrthoGraph:
    n_vertices: int
    edges: frozenset
    dim: int
    rays: tuple[Ray, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValueError(f"edge {(i, j)} out of range")
        object.__setattr__(self, "edges", edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        nbrs = [set() for _ in range(self.n_vertices)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return tuple(frozenset(s) for s in nbrs)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabeled(self, perm: Sequence[int]) -> "OrthoGraph":
        """Graph in which old vertex v becomes ``perm[v]``."""
        rays = None
        if self.rays is not None:
            rays = [None] * self.n_vertices
            for old, new in enumerate(perm):
                rays[new] = self.rays[old]
            rays = tuple(rays)
        edges = frozenset((perm[i], perm[j]) for i, j in self.edges)
        return OrthoGraph(self.n_vertices, edges, self.dim, rays)

    def induced(self, keep: Sequence[int]) -> "OrthoGraph":
        """Subgraph on ``keep``, renumbered 0.. in the given order."""
        index = {v: k for k, v in enumerate(keep)}
        edges = frozenset((index[i], index[j]) for i, j in self.edges if i in index and j in index)
        rays = None if self.rays is None else tuple(self.rays[v] for v in keep)
        return OrthoGraph(len(keep), edges, self.dim, rays)


@dataclass(frozen=True, order=True)
class Basis:
    vertices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)


def graph_from_rays(rays: Sequence[Ray], dim: int, tol: Tolerance = DEFAULT_TOL) -> OrthoGraph:
    if not rays:
        return OrthoGraph(0, frozenset(), dim, ())
    m = ray_matrix(rays)
    overlap = np.abs(m.conj() @ m.T)
    ii, jj = np.nonzero(np.triu(overlap <= tol.ortho_tol, k=1))
    edges = frozenset(zip(ii.tolist(), jj.tolist()))
    return OrthoGraph(len(rays), edges, dim, tuple(rays))


def build_graph(record, tol: Tolerance = DEFAULT_TOL) -> OrthoGraph:
    """Orthogonality graph of a catalog record; vertex k is ray k."""
    return graph_from_rays(record.rays, record.dim, tol)


def enumerate_bases(graph: OrthoGraph, check_projectors: bool = True) -> list[Basis]:
    """All cliques of size ``graph.dim``, in lexicographic vertex order.

    When the graph carries rays, each clique is checked to be a resolution of
    the identity (sum of rank-1 projectors within 1e-8 Frobenius).
    """
    n = graph.dim
    adj = graph.adjacency
    out: list[Basis] = []

    def extend(clique: list[int], cand: frozenset):
        if len(clique) == n:
            out.append(Basis(tuple(clique)))
            return
        for v in sorted(cand):
            extend(clique + [v], cand & {u for u in adj[v] if u > v})

    for v in range(graph.n_vertices):
        extend([v], frozenset(u for u in adj[v] if u > v))

    if check_projectors and graph.rays is not None:
        for b in out:
            if projector_defect(graph.rays, b) > 1e-8:
                raise CliqueNotBasisError(f"clique {b.vertices} is not a resolution of the identity")
    return out


def projector_defect(rays: Sequence[Ray], basis: Basis) -> float:
    """Frobenius distance between sum of the basis projectors and the identity."""
    m = ray_matrix([rays[v] for v in basis])
    total = m.T @ m.conj()
    return float(np.linalg.norm(total - np.eye(m.shape[1])))


# ---------------------------------------------------------------- isomorphism

def _refine(adjs, colours):
    """Joint colour refinement of several graphs sharing one palette."""
    while True:
        new = []
        for adj, col in zip(adjs, colours):
            sig = [(col[v], tuple(sorted(col[u] for u in adj[v]))) for v in range(len(adj))]
            new.append(sig)
        keys = sorted({s for sig in new for s in sig})
        palette = {k: i for i, k in enumerate(keys)}
        new = [[palette[s] for s in sig] for sig in new]
        if all(len(set(n)) == len(set(c)) for n, c in zip(new, colours)):
            return new
        colours = new


def _histogram(col):
    h: dict = {}
    for c in col:
        h[c] = h.get(c, 0) + 1
    return h


def graph_isomorphic(g1: OrthoGraph, g2: OrthoGraph) -> dict[int, int] | None:
    """A vertex bijection carrying g1's edges exactly onto g2's, or None.

    Individualise-and-refine search: colour refinement prunes candidates,
    backtracking picks images inside the smallest ambiguous colour class.
    """
    if g1.n_vertices != g2.n_vertices or len(g1.edges) != len(g2.edges):
        return None
    n = g1.n_vertices
    if n == 0:
        return {}
    a1, a2 = g1.adjacency, g2.adjacency
    c1, c2 = _refine((a1, a2), ([0] * n, [0] * n))
    if _histogram(c1) != _histogram(c2):
        return None

    def search(c1, c2):
        if _histogram(c1) != _histogram(c2):
            return None
        hist = _histogram(c1)
        ambiguous = [c for c, k in hist.items() if k > 1]
        if not ambiguous:
            m = {v: c2.index(c1[v]) for v in range(n)}
            if all(m[j] in a2[m[i]] for i, j in g1.edges):
                return m
            return None
        target = min(ambiguous, key=lambda c: (hist[c], c))
        v = c1.index(target)
        fresh = max(max(c1), max(c2)) + 1
        for w in (u for u in range(n) if c2[u] == target):
            d1, d2 = list(c1), list(c2)
            d1[v], d2[w] = fresh, fresh
            r1, r2 = _refine((a1, a2), (d1, d2))
            found = search(r1, r2)
            if found is not None:
                return found
        return None

    return search(c1, c2)


def is_isomorphism(g1: OrthoGraph, g2: OrthoGraph, mapping: dict[int, int]) -> bool:
    if sorted(mapping) != list(range(g1.n_vertices)) or sorted(mapping.values()) != list(range(g2.n_vertices)):
        return False
    return frozenset(tuple(sorted((mapping[i], mapping[j]))) for i, j in g1.edges) == g2.edges


# ------------------------------------------------------------------------ DOT

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: OrthoGraph, labels: Sequence[str] | None = None, name: str = "G") -> str:
    if labels is not None and len(labels) != graph.n_vertices:
        raise LabelError(f"{len(labels)} labels for {graph.n_vertices} vertices")
    lines = [f"graph {_quote(name)} {{"]
    for v in range(graph.n_vertices):
        label = str(v) if labels is None else labels[v]
        lines.append(f"  {v} [label={_quote(label)}];")
    for i, j in graph.sorted_edges():
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"

