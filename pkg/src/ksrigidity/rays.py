"""Rays in C^n: canonical forms, inner products and orthogonal completion.

All numerics are double precision.  A ray is stored as a unit vector whose
first component of non-negligible modulus is real and positive, which picks
one representative out of every projective class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateSpanError, DimensionError, ZeroVectorError


@dataclass(frozen=True)
class Tolerance:
    ortho_tol: float = 1e-9
    rank_tol: float = 1e-6
    gap_min: float = 1e3

    def __post_init__(self):
        if not (self.ortho_tol > 0 and self.rank_tol > 0 and self.gap_min > 0):
            raise ValueError("tolerances must be strictly positive")
        if not self.gap_min > 1:
            raise ValueError("gap_min must exceed 1")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class ComplexScalar:
    value: complex
    origin: str | None = None

    def __post_init__(self):
        v = complex(self.value)
        if not (np.isfinite(v.real) and np.isfinite(v.imag)):
            raise ValueError(f"non-finite scalar {v!r}")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class Ray:
    """Phase-canonical unit vector.  Build through :func:`canonicalize`."""

    vec: np.ndarray

    def __post_init__(self):
        v = np.array(self.vec, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    @property
    def components(self) -> tuple[complex, ...]:
        return tuple(complex(c) for c in self.vec)

    def is_real(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.vec.imag) <= atol))

    def allclose(self, other: "Ray", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.vec, other.vec, atol=atol, rtol=0))

    def __repr__(self):
        comps = ", ".join(f"{c:.6g}" for c in self.components)
        return f"Ray({comps})"


def _as_array(components) -> np.ndarray:
    if isinstance(components, Ray):
        return components.vec
    if isinstance(components, np.ndarray):
        return components.astype(complex)
    return np.array([complex(c) for c in components], dtype=complex)


def canonicalize(components, tol: Tolerance = DEFAULT_TOL) -> Ray:
    """Return the phase-canonical unit ray through ``components``.

    The phase is fixed on the first component whose modulus exceeds
    ``tol.ortho_tol`` after normalisation; components below that threshold
    are set to exactly zero so noise cannot move the canonical phase.
    """
    v = _as_array(components)
    if v.ndim != 1:
        raise DimensionError("expected a one-dimensional component list")
    norm = np.linalg.norm(v)
    if not np.isfinite(norm):
        raise ValueError("non-finite components")
    if norm <= tol.ortho_tol:
        raise ZeroVectorError("cannot canonicalize the zero vector")
    v = v / norm
    small = np.abs(v) <= tol.ortho_tol
    v[small] = 0
    lead = int(np.argmax(~small))
    v = v * (abs(v[lead]) / v[lead])
    v[lead] = abs(v[lead])
    v = v / np.linalg.norm(v)
    return Ray(v)


def _check_dims(u: Ray, v: Ray):
    if u.dim != v.dim:
        raise DimensionError(f"dimension mismatch: {u.dim} vs {v.dim}")


def inner_product(u: Ray, v: Ray) -> complex:
    """<u, v> = sum conj(u_k) v_k."""
    _check_dims(u, v)
    return complex(np.vdot(u.vec, v.vec))


def is_orthogonal(u: Ray, v: Ray, tol: Tolerance = DEFAULT_TOL) -> bool:
    return abs(inner_product(u, v)) <= tol.ortho_tol


def orthogonal_complement_ray(rays: Sequence[Ray], dim: int, tol: Tolerance = DEFAULT_TOL) -> Ray:
    """The unique ray orthogonal to ``dim - 1`` independent rays.

    Uses the null space of the stacked conjugated rows (SVD), so every
    dimension shares one code path.
    """
    if len(rays) != dim - 1:
        raise DimensionError(f"need exactly {dim - 1} rays in dimension {dim}, got {len(rays)}")
    for r in rays:
        if r.dim != dim:
            raise DimensionError(f"ray of dimension {r.dim} in a dimension-{dim} completion")
    a = np.array([r.vec for r in rays]).conj()
    _, s, vh = np.linalg.svd(a)
    if s[-1] <= tol.rank_tol * s[0]:
        raise DegenerateSpanError("input rays are linearly dependent")
    out = canonicalize(vh[-1].conj(), tol)
    for r in rays:
        if not is_orthogonal(r, out, tol):
            raise DegenerateSpanError("completion failed the orthogonality check")
    return out


def ray_matrix(rays: Iterable[Ray]) -> np.ndarray:
    """Stack rays as rows of a complex array."""
    return np.array([r.vec for r in rays], dtype=complex)
