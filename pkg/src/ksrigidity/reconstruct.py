"""Rebuild a ray set from its orthogonality graph alone, counting parameters.

The pinned basis becomes the standard basis.  Vertices are then added one
at a time: a vertex with n-1 independent determined neighbours is their
unique orthogonal completion; otherwise the vertex with the most determined
neighbours is placed in the complement W of its k independent neighbours,
costing 2(n-1-k) real parameters (a point of CP(W) in an affine chart, the
overall phase and scale being irrelevant).  Whenever a new vertex brings an
orthogonality that does not yet hold, all parameters introduced so far are
re-solved by least squares.

Bookkeeping: once every vertex is placed and every edge holds, the count
reported is

    introduced parameters - rank d(edges)/d(parameters) - diagonal-phase orbit dimension,

evaluated on a re-parameterisation built from the final rays, i.e. only the
parameters that were never constrained away, modulo the phases that fix the
pinned basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import least_squares

from .catalog import find_duplicate
from .errors import InputError
from .graph import Basis, OrthoGraph, graph_from_rays
from .rays import DEFAULT_TOL, Ray, Tolerance, canonicalize

log = logging.getLogger(__name__)

RETRIES = 8


@dataclass
class _Step:
    vertex: int
    axis: int | None  # pinned basis vertices sit on a coordinate axis
    neighbours: tuple[int, ...]
    refs: np.ndarray | None  # (n, n-k) random vectors projected into W
    offset: int = 0

    @property
    def n_params(self) -> int:
        if self.axis is not None:
            return 0
        return 2 * (self.refs.shape[1] - 1)


class Reconstruction(NamedTuple):
    rays: tuple[Ray, ...] | None
    parameters_introduced: int | None
    consistency: bool


def _complement_frame(nbr: np.ndarray, refs: np.ndarray) -> np.ndarray:
    """Project the reference vectors onto the complement of the neighbour rays."""
    if nbr.shape[0] == 0:
        return refs
    q, _ = np.linalg.qr(nbr.T)
    return refs - q @ (q.conj().T @ refs)


class _Plan:
    def __init__(self, n: int, n_vertices: int):
        self.n = n
        self.n_vertices = n_vertices
        self.steps: list[_Step] = []
        self.n_params = 0

    def add(self, step: _Step):
        step.offset = self.n_params
        self.n_params += step.n_params
        self.steps.append(step)

    def build(self, p: np.ndarray) -> np.ndarray:
        n = self.n
        u = np.zeros((self.n_vertices, n), dtype=complex)
        for s in self.steps:
            if s.axis is not None:
                u[s.vertex, s.axis] = 1
                continue
            w = _complement_frame(u[list(s.neighbours)], s.refs)
            d = w.shape[1] - 1
            if d:
                z = p[s.offset:s.offset + d] + 1j * p[s.offset + d:s.offset + 2 * d]
                v = w[:, 0] + w[:, 1:] @ z
            else:
                v = w[:, 0]
            u[s.vertex] = v / np.linalg.norm(v)
        return u

    def fit(self, target: np.ndarray) -> np.ndarray:
        """Parameters reproducing ``target`` rays (every vertex must be placed)."""
        p = np.zeros(self.n_params)
        u = np.zeros_like(target)
        for s in self.steps:
            if s.axis is not None:
                u[s.vertex, s.axis] = 1
                continue
            w = _complement_frame(u[list(s.neighbours)], s.refs)
            d = w.shape[1] - 1
            if d:
                c = np.linalg.lstsq(w, target[s.vertex], rcond=None)[0]
                z = c[1:] / c[0]
                p[s.offset:s.offset + d] = z.real
                p[s.offset + d:s.offset + 2 * d] = z.imag
                v = w[:, 0] + w[:, 1:] @ z
            else:
                v = w[:, 0]
            u[s.vertex] = v / np.linalg.norm(v)
        return p


def _edge_residues(u: np.ndarray, edges: np.ndarray) -> np.ndarray:
    if len(edges) == 0:
        return np.zeros(0)
    ip = np.einsum("ka,ka->k", u[edges[:, 0]].conj(), u[edges[:, 1]])
    return np.concatenate([ip.real, ip.imag])


def _independent(u: np.ndarray, candidates: Sequence[int], limit: int, rank_tol: float) -> tuple[int, ...]:
    chosen: list[int] = []
    for c in candidates:
        trial = u[chosen + [c]]
        s = np.linalg.svd(trial, compute_uv=False)
        if s[-1] > rank_tol * s[0]:
            chosen.append(c)
            if len(chosen) == limit:
                break
    return tuple(chosen)


def _fd_jacobian(fun, p: np.ndarray, h: float = 1e-6) -> np.ndarray:
    cols = []
    for k in range(len(p)):
        e = np.zeros_like(p)
        e[k] = h
        cols.append((fun(p + e) - fun(p - e)) / (2 * h))
    return np.array(cols).T


def _phase_orbit_dim(u: np.ndarray) -> int:
    """Dimension of the orbit of the ray configuration under diagonal phases."""
    n = u.shape[1]
    gens = []
    for k in range(n):
        du = np.zeros_like(u)
        du[:, k] = 1j * u[:, k]
        overlap = np.einsum("va,va->v", u.conj(), du)
        horiz = du - overlap[:, None] * u
        gens.append(np.concatenate([horiz.real.ravel(), horiz.imag.ravel()]))
    s = np.linalg.svd(np.array(gens), compute_uv=False)
    return int(np.sum(s > 1e-8 * max(s[0], 1.0)))


def _attempt(graph: OrthoGraph, pinned: Basis, rng: np.random.Generator, tol: Tolerance):
    n, nv = graph.dim, graph.n_vertices
    adj = graph.adjacency
    all_edges = np.array(graph.sorted_edges(), dtype=int).reshape(-1, 2)
    plan = _Plan(n, nv)
    for k, v in enumerate(pinned.vertices):
        plan.add(_Step(v, k, (), None))
    order = list(pinned.vertices)
    done = set(order)
    p = np.zeros(0)
    u = plan.build(p)

    while len(done) < nv:
        best = None
        for v in range(nv):
            if v in done:
                continue
            nbrs = [w for w in order if w in adj[v]]
            chosen = _independent(u, nbrs, n - 1, tol.rank_tol)
            key = (len(chosen) == n - 1, len(nbrs), -v)
            if best is None or key > best[0]:
                best = (key, v, chosen)
        _, v, chosen = best
        d = n - len(chosen)
        refs = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        step = _Step(v, None, chosen, refs)
        plan.add(step)
        p = np.concatenate([p, rng.standard_normal(step.n_params)])
        order.append(v)
        done.add(v)

        inside = np.array([e for e in all_edges if e[0] in done and e[1] in done], dtype=int).reshape(-1, 2)
        fun = lambda q, inside=inside: _edge_residues(plan.build(q), inside)  # noqa: E731
        if np.max(np.abs(fun(p)), initial=0.0) > 1e-12:
            if len(p) == 0:
                return None
            sol = least_squares(fun, p, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=100)
            p = sol.x
            if np.max(np.abs(fun(p))) > 1e-10:
                log.debug("attempt stalled after placing vertex %d", v)
                return None
        u = plan.build(p)

    if np.max(np.abs(_edge_residues(u, all_edges)), initial=0.0) > tol.ortho_tol:
        return None
    rays = tuple(canonicalize(r, tol) for r in u)
    if find_duplicate(rays) is not None:
        return None
    if graph_from_rays(rays, n, tol).edges != graph.edges:
        log.debug("realisation carries extra orthogonalities")
        return None

    # recount on a parameterisation rebuilt at the final rays
    final = _Plan(n, nv)
    for s in plan.steps:
        if s.axis is not None:
            final.add(_Step(s.vertex, s.axis, (), None))
            continue
        placed = [w for w in order[:order.index(s.vertex)] if w in adj[s.vertex]]
        chosen = _independent(u, placed, n - 1, tol.rank_tol)
        d = n - len(chosen)
        refs = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        final.add(_Step(s.vertex, None, chosen, refs))
    q = final.fit(u)
    if final.n_params == 0:
        return rays, 0
    jac = _fd_jacobian(lambda x: _edge_residues(final.build(x), all_edges), q)
    s = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(s > tol.rank_tol * s[0])) if s.size and s[0] > 0 else 0
    count = final.n_params - rank - _phase_orbit_dim(u)
    log.debug("introduced %d, constraint rank %d, kept %d", final.n_params, rank, count)
    return rays, count


def _components(graph: OrthoGraph) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for start in range(graph.n_vertices):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in graph.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        out.append(sorted(comp))
    return out


def _reconstruct_connected(graph: OrthoGraph, pinned: Basis, seed: int, tol: Tolerance, retries: int):
    best = None
    for attempt in range(retries):
        rng = np.random.default_rng([seed, attempt])
        result = _attempt(graph, pinned, rng, tol)
        if result is None:
            continue
        if best is None or result[1] < best[1]:
            best = result
        if best[1] == 0:
            break  # nothing can undercut zero
    return best


def propagate_reconstruct(graph: OrthoGraph, bases: Sequence[Basis], seed: int = 0,
                          tol: Tolerance = DEFAULT_TOL, retries: int = RETRIES) -> Reconstruction:
    """Reconstruct rays from the graph and count the parameters left free.

    Runs ``retries`` independent attempts derived from ``seed`` and keeps the
    smallest count among consistent ones (an unlucky draw can only overcount
    or fail).  A consistent attempt realises every edge within
    ``tol.ortho_tol``, no others, with pairwise distinct rays.

    A disconnected graph is rebuilt one component at a time, each pinned on
    its own first basis, and the counts are added.
    """
    if not bases:
        raise InputError("need at least one basis to pin")
    comps = _components(graph)
    if len(comps) == 1:
        best = _reconstruct_connected(graph, bases[0], seed, tol, retries)
        if best is None:
            return Reconstruction(None, None, False)
        return Reconstruction(best[0], best[1], True)

    n = graph.dim
    vecs = np.zeros((graph.n_vertices, n), dtype=complex)
    total = 0
    for c, comp in enumerate(comps):
        index = {v: k for k, v in enumerate(comp)}
        inner = [b for b in bases if all(v in index for v in b.vertices)]
        if not inner:
            raise InputError(f"component {comp[:5]}... contains no basis to pin")
        sub = graph.induced(comp)
        best = _reconstruct_connected(sub, Basis(tuple(index[v] for v in inner[0].vertices)),
                                      seed + 7919 * c, tol, retries)
        if best is None:
            return Reconstruction(None, None, False)
        block = np.array([r.vec for r in best[0]])
        if c:
            # move later components off the standard basis
            rng = np.random.default_rng([seed, 104729, c])
            q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            block = block @ q.T
        vecs[comp] = block
        total += best[1]
    rays = tuple(canonicalize(r, tol) for r in vecs)
    ok = find_duplicate(rays) is None and graph_from_rays(rays, n, tol).edges == graph.edges
    return Reconstruction(rays if ok else None, total if ok else None, ok)
