"""Free-parameter counting for ray sets with a prescribed orthogonality graph.

One basis is rotated onto the standard basis.  Every other ray gets a chart
of CP^{n-1} around its reference position,

    u(z) = r + T z,   T an orthonormal basis of r-perp,  z in C^{n-1},

i.e. 2n-2 real coordinates.  Each graph edge not inside the pinned basis
contributes the real and imaginary part of <u_i, u_j>.  The null space of
the Jacobian at the reference, minus the directions generated by the
diagonal phases that fix the pinned basis, is the number of free parameters.
Counting is done over C even for real sets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import KSSetRecord
from .errors import ContinuationStallError, InputError
from .graph import Basis, OrthoGraph, build_graph, enumerate_bases, graph_from_rays
from .rays import DEFAULT_TOL, Tolerance, canonicalize, ray_matrix

log = logging.getLogger(__name__)


def complement_basis(r: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of ``r``.

    Real whenever ``r`` is real, so real sets keep a real chart.
    """
    if np.all(np.abs(r.imag) <= 1e-15):
        _, _, vh = np.linalg.svd(r.real[None, :])
        return vh[1:].T.astype(complex)
    _, _, vh = np.linalg.svd(r.conj()[None, :])
    return vh[1:].conj().T


@dataclass(frozen=True, eq=False)
class GaugeFrame:
    pinned_basis: Basis
    pinned_vertex_order: dict  # vertex -> standard coordinate index
    unitary: np.ndarray  # maps the pinned basis rays onto e_1..e_n
    reference: np.ndarray  # all rays after rotation, canonical, one per row
    free: tuple[int, ...]
    charts: np.ndarray  # (n_free, n, n-1)

    @property
    def dim(self) -> int:
        return self.reference.shape[1]

    @property
    def n_coords(self) -> int:
        return 2 * (self.dim - 1) * len(self.free)

    def split(self, x: np.ndarray) -> np.ndarray:
        """Complex chart coordinates z, shape (n_free, n-1)."""
        m = self.dim - 1
        x = np.asarray(x, dtype=float).reshape(len(self.free), 2 * m)
        return x[:, :m] + 1j * x[:, m:]

    def join(self, z: np.ndarray) -> np.ndarray:
        return np.concatenate([z.real, z.imag], axis=1).ravel()

    def rays_at(self, x: np.ndarray | None = None) -> np.ndarray:
        """Unnormalised rays at chart coordinates ``x`` (all rays, row per vertex)."""
        u = self.reference.copy()
        if x is not None and len(self.free):
            z = self.split(x)
            u[list(self.free)] += np.einsum("kab,kb->ka", self.charts, z)
        return u


def gauge_fix(record: KSSetRecord, graph: OrthoGraph, basis: Basis,
              tol: Tolerance = DEFAULT_TOL) -> GaugeFrame:
    n = record.dim
    vs = basis.vertices
    if len(vs) != n or any(not (0 <= v < len(record.rays)) for v in vs):
        raise InputError(f"{vs} is not a basis of a dimension-{n} set")
    if any(not graph.has_edge(vs[a], vs[b]) for a in range(n) for b in range(a + 1, n)):
        raise InputError(f"{vs} is not a clique of the orthogonality graph")
    rows = ray_matrix([record.rays[v] for v in vs])
    unitary = rows.conj()
    if np.linalg.norm(unitary @ unitary.conj().T - np.eye(n)) > 1e-8:
        raise InputError(f"rays {vs} are not an orthonormal basis")
    ref = np.array([canonicalize(unitary @ r.vec, tol).vec for r in record.rays])
    for k, v in enumerate(vs):
        ref[v] = np.eye(n)[k]
    free = tuple(v for v in range(len(record.rays)) if v not in vs)
    charts = np.array([complement_basis(ref[v]) for v in free]).reshape(len(free), n, n - 1)
    return GaugeFrame(basis, {v: k for k, v in enumerate(vs)}, unitary, ref, free, charts)


@dataclass(eq=False)
class ConstraintSystem:
    frame: GaugeFrame
    edges: tuple[tuple[int, int], ...]
    jacobian: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._slot = {v: k for k, v in enumerate(self.frame.free)}
        self._i = np.array([e[0] for e in self.edges], dtype=int)
        self._j = np.array([e[1] for e in self.edges], dtype=int)
        self.jacobian = self.jacobian_at(None)

    @property
    def n_coords(self) -> int:
        return self.frame.n_coords

    @property
    def n_residues(self) -> int:
        return 2 * len(self.edges)

    def residues(self, x: np.ndarray | None = None) -> np.ndarray:
        """[Re <u_i,u_j>, Im <u_i,u_j>] for each constrained edge, interleaved."""
        u = self.frame.rays_at(x)
        ip = np.einsum("ka,ka->k", u[self._i].conj(), u[self._j])
        out = np.empty(2 * len(ip))
        out[0::2] = ip.real
        out[1::2] = ip.imag
        return out

    def jacobian_at(self, x: np.ndarray | None = None) -> np.ndarray:
        """Analytic Jacobian of :meth:`residues`.

        With z = a + ib, d<u_i,u_j>/da = T_i^H u_j, d/db = -i T_i^H u_j on
        the conjugated side; d/da = u_i^H T_j, d/db = i u_i^H T_j on the other.
        """
        frame = self.frame
        m = frame.dim - 1
        u = frame.rays_at(x)
        jac = np.zeros((self.n_residues, self.n_coords))
        for row, (i, j) in enumerate(self.edges):
            for vert, other, conj_side in ((i, j, True), (j, i, False)):
                slot = self._slot.get(vert)
                if slot is None:
                    continue
                t = frame.charts[slot]
                if conj_side:
                    da = t.conj().T @ u[other]
                    db = -1j * da
                else:
                    da = u[other].conj() @ t
                    db = 1j * da
                cols = slice(2 * m * slot, 2 * m * slot + m)
                cols_b = slice(2 * m * slot + m, 2 * m * (slot + 1))
                jac[2 * row, cols] += da.real
                jac[2 * row + 1, cols] += da.imag
                jac[2 * row, cols_b] += db.real
                jac[2 * row + 1, cols_b] += db.imag
        return jac

    def finite_difference_jacobian(self, x: np.ndarray | None = None, h: float = 1e-6) -> np.ndarray:
        x0 = np.zeros(self.n_coords) if x is None else np.asarray(x, dtype=float)
        cols = []
        for k in range(self.n_coords):
            e = np.zeros(self.n_coords)
            e[k] = h
            cols.append((self.residues(x0 + e) - self.residues(x0 - e)) / (2 * h))
        if not cols:
            return np.zeros((self.n_residues, 0))
        return np.array(cols).T


def assemble_constraints(frame: GaugeFrame, graph: OrthoGraph) -> ConstraintSystem:
    pinned = set(frame.pinned_basis.vertices)
    edges = tuple(e for e in graph.sorted_edges() if not (e[0] in pinned and e[1] in pinned))
    return ConstraintSystem(frame, edges)


def gauge_generators(frame: GaugeFrame, x: np.ndarray | None = None) -> np.ndarray:
    """Chart velocities of the n diagonal phase rotations, one column each.

    For u = r + T z the velocity i*Theta*u is taken modulo u itself
    (the r-component of u is 1), giving dz = T^H (i Theta u - c u) with
    c = r^H (i Theta u).
    """
    n = frame.dim
    u = frame.rays_at(x)
    cols = []
    for k in range(n):
        dz = np.zeros((len(frame.free), n - 1), dtype=complex)
        for slot, v in enumerate(frame.free):
            du = np.zeros(n, dtype=complex)
            du[k] = 1j * u[v, k]
            c = np.vdot(frame.reference[v], du)
            dz[slot] = frame.charts[slot].conj().T @ (du - c * u[v])
        cols.append(frame.join(dz))
    if not cols or frame.n_coords == 0:
        return np.zeros((frame.n_coords, n))
    return np.array(cols).T


def _orthonormal_columns(a: np.ndarray, cutoff: float) -> np.ndarray:
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    uu, s, _ = np.linalg.svd(a, full_matrices=False)
    return uu[:, s > cutoff]


def residual_gauge_tangents(frame: GaugeFrame, x: np.ndarray | None = None) -> list[np.ndarray]:
    """Orthonormal tangents of the diagonal-phase stabiliser of the pinned basis.

    Global phase acts trivially, so at most n-1 survive; generators of
    norm below 1e-10 are dropped.
    """
    basis = _orthonormal_columns(gauge_generators(frame, x), 1e-10)
    return [basis[:, k] for k in range(basis.shape[1])]


@dataclass(frozen=True)
class RigidityReport:
    name: str
    dim: int
    pinned_basis: tuple[int, ...]
    n_coords: int
    n_residues: int
    singular_values: tuple[float, ...]
    null_dim: int
    residual_gauge_dim: int
    parameter_count: int
    gap_ratio: float
    conclusive: bool
    # null space restricted to real coordinates, reported for real sets only
    real_parameter_count: int | None = None

    @property
    def status(self) -> str:
        return "CONCLUSIVE" if self.conclusive else "INCONCLUSIVE"


@dataclass(frozen=True)
class _Spectrum:
    singular_values: np.ndarray
    rank: int
    null_basis: np.ndarray
    gap_ratio: float


def _spectrum(jac: np.ndarray, rank_tol: float) -> _Spectrum:
    n_cols = jac.shape[1]
    if n_cols == 0:
        return _Spectrum(np.zeros(0), 0, np.zeros((0, 0)), math.inf)
    if jac.shape[0] == 0:
        return _Spectrum(np.zeros(0), 0, np.eye(n_cols), math.inf)
    _, s, vh = np.linalg.svd(jac, full_matrices=True)
    padded = np.concatenate([s, np.zeros(n_cols - len(s))])
    smax = padded[0]
    rank = int(np.sum(padded > rank_tol * smax)) if smax > 0 else 0
    if rank == 0 or rank == n_cols:
        gap = math.inf
    else:
        discarded = padded[rank]
        gap = math.inf if discarded == 0 else float(padded[rank - 1] / discarded)
    return _Spectrum(s, rank, vh[rank:].T, gap)


def _gauge_in_null(null_basis: np.ndarray, tangents: Sequence[np.ndarray], rank_tol: float) -> int:
    if null_basis.shape[1] == 0 or not tangents:
        return 0
    proj = null_basis.T @ np.array(tangents).T
    s = np.linalg.svd(proj, compute_uv=False)
    return int(np.sum(s > rank_tol))


def analyze(record: KSSetRecord, tol: Tolerance = DEFAULT_TOL, basis_index: int = 0):
    """Frame, constraint system and report for one pinned basis."""
    graph = build_graph(record, tol)
    bases = enumerate_bases(graph)
    if not bases:
        raise InputError(f"{record.name} has no complete basis to pin")
    if not 0 <= basis_index < len(bases):
        raise InputError(f"basis index {basis_index} out of range (set has {len(bases)} bases)")
    frame = gauge_fix(record, graph, bases[basis_index], tol)
    system = assemble_constraints(frame, graph)
    spectrum = _spectrum(system.jacobian, tol.rank_tol)
    tangents = residual_gauge_tangents(frame)
    gauge_dim = _gauge_in_null(spectrum.null_basis, tangents, tol.rank_tol)
    null_dim = spectrum.null_basis.shape[1]

    real_count = None
    if np.all(np.abs(frame.reference.imag) <= 1e-12):
        m = record.dim - 1
        real_cols = [c for c in range(system.n_coords) if c % (2 * m) < m]
        real_count = _spectrum(system.jacobian[:, real_cols], tol.rank_tol).null_basis.shape[1]

    report = RigidityReport(
        name=record.name,
        dim=record.dim,
        pinned_basis=bases[basis_index].vertices,
        n_coords=system.n_coords,
        n_residues=system.n_residues,
        singular_values=tuple(float(s) for s in spectrum.singular_values),
        null_dim=null_dim,
        residual_gauge_dim=gauge_dim,
        parameter_count=null_dim - gauge_dim,
        gap_ratio=spectrum.gap_ratio,
        conclusive=spectrum.gap_ratio >= tol.gap_min,
        real_parameter_count=real_count,
    )
    return frame, system, report


def parameter_count(record: KSSetRecord, tol: Tolerance = DEFAULT_TOL, basis_index: int = 0) -> RigidityReport:
    """Free parameters left once the orthogonality graph and gauge are imposed."""
    return analyze(record, tol, basis_index)[2]


def _genuine_directions(null_basis: np.ndarray, gauge: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the null space with gauge directions removed."""
    if gauge.shape[1]:
        gq = _orthonormal_columns(null_basis @ (null_basis.T @ gauge), 1e-8)
        rest = null_basis - gq @ (gq.T @ null_basis)
    else:
        rest = null_basis
    dirs = _orthonormal_columns(rest, 1e-6)
    # deterministic sign: largest entry positive
    for k in range(dirs.shape[1]):
        if dirs[np.argmax(np.abs(dirs[:, k])), k] < 0:
            dirs[:, k] *= -1
    return dirs


def max_edge_residue(record: KSSetRecord, graph: OrthoGraph) -> float:
    m = record.matrix
    if not graph.edges:
        return 0.0
    i, j = np.array(graph.sorted_edges()).T
    return float(np.max(np.abs(np.einsum("ka,ka->k", m[i].conj(), m[j]))))


def _newton(system: ConstraintSystem, x: np.ndarray, target: float, accept: float,
            max_iter: int = 50) -> np.ndarray:
    """Minimum-norm Gauss-Newton correction back onto the constraint set."""
    res = np.max(np.abs(system.residues(x)), initial=0.0)
    for _ in range(max_iter):
        if res <= target:
            return x
        f = system.residues(x)
        dx = np.linalg.lstsq(system.jacobian_at(x), f, rcond=None)[0]
        x = x - dx
        res = np.max(np.abs(system.residues(x)), initial=0.0)
    if res <= accept:
        return x
    raise ContinuationStallError("Newton correction did not converge in %d iterations" % max_iter, res)


def flex(record: KSSetRecord, direction_index: int, steps: int, step_size: float,
         tol: Tolerance = DEFAULT_TOL, basis_index: int = 0) -> list[KSSetRecord]:
    """Trace the constraint manifold along one genuine (non-gauge) null direction.

    Each step predicts along the current tangent and corrects with Newton;
    the tangent is re-derived at every accepted point and kept continuous by
    projecting the previous one.  Returned sets live in the gauge frame
    (pinned basis = standard basis) and keep the original graph exactly.
    """
    if not 0 < step_size <= 0.1:
        raise InputError("step_size must lie in (0, 0.1]")
    if steps < 0:
        raise InputError("steps must be non-negative")
    frame, system, report = analyze(record, tol, basis_index)
    if not report.conclusive:
        raise InputError(f"{record.name}: rigidity analysis is inconclusive (gap {report.gap_ratio:.3g})")
    if report.parameter_count == 0:
        raise InputError(f"{record.name}: set is rigid")
    if not 0 <= direction_index < report.parameter_count:
        raise InputError(f"direction {direction_index} out of range; "
                         f"{record.name} has {report.parameter_count} parameter direction(s)")
    graph = build_graph(record, tol)
    rank = system.n_coords - report.null_dim

    def directions(x):
        jac = system.jacobian_at(x)
        _, _, vh = np.linalg.svd(jac, full_matrices=True)
        null = vh[rank:].T
        return _genuine_directions(null, gauge_generators(frame, x))

    tangent = directions(None)[:, direction_index]
    x = np.zeros(system.n_coords)
    out = []
    for step in range(1, steps + 1):
        x = _newton(system, x + step_size * tangent, 1e-3 * tol.ortho_tol, tol.ortho_tol)
        u = frame.rays_at(x)
        rays = [canonicalize(v, tol) for v in u]
        new = record.with_rays(rays, f"{record.name}-flex{direction_index}-{step:03d}")
        new_graph = graph_from_rays(new.rays, new.dim, tol)
        if new_graph.edges != graph.edges:
            raise ContinuationStallError(f"orthogonality graph changed at step {step}",
                                         max_edge_residue(new, graph))
        out.append(new)
        dirs = directions(x)
        proj = dirs @ (dirs.T @ tangent)
        norm = np.linalg.norm(proj)
        if norm < 1e-6:
            raise ContinuationStallError(f"tangent lost at step {step}", float(np.max(np.abs(system.residues(x)))))
        tangent = proj / norm
        log.debug("flex step %d: residue %.3e", step, max_edge_residue(new, graph))
    return out
