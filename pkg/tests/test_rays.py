import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ksrigidity.errors import DegenerateSpanError, DimensionError, ZeroVectorError
from ksrigidity.rays import (
    DEFAULT_TOL, Tolerance, canonicalize, inner_product, is_orthogonal, orthogonal_complement_ray,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
cvec = st.lists(st.tuples(finite, finite), min_size=3, max_size=4).map(
    lambda xs: np.array([complex(a, b) for a, b in xs]))


def test_canonical_phase_and_norm():
    r = canonicalize([0, 1j, 1])
    assert r.components[0] == 0
    assert r.components[1] == pytest.approx(1 / np.sqrt(2))
    assert abs(np.linalg.norm(r.vec) - 1) < 1e-15


def test_zero_vector_rejected():
    with pytest.raises(ZeroVectorError):
        canonicalize([0, 0, 0])


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner_product(canonicalize([1, 0, 0]), canonicalize([1, 0, 0, 0]))


@settings(max_examples=60, deadline=None)
@given(cvec, finite)
def test_projective_invariance(v, theta):
    if np.linalg.norm(v) < 1e-3:
        return
    a = canonicalize(v)
    b = canonicalize(v * 2.5 * np.exp(1j * theta))
    assert a.allclose(b, atol=1e-9)


def test_orthogonality_threshold():
    tol = Tolerance(ortho_tol=1e-6)
    u = canonicalize([1, 0, 0])
    assert is_orthogonal(u, canonicalize([1e-8, 1, 0]), tol)
    assert not is_orthogonal(u, canonicalize([1e-3, 1, 0]), tol)


def test_complement_of_two_rays():
    r = orthogonal_complement_ray([canonicalize([1, 1, 0]), canonicalize([1, -1, 1])], 3)
    for s in ([1, 1, 0], [1, -1, 1]):
        assert abs(np.vdot(canonicalize(s).vec, r.vec)) < 1e-12


def test_complement_of_dependent_rays():
    with pytest.raises(DegenerateSpanError):
        orthogonal_complement_ray([canonicalize([1, 0, 0]), canonicalize([2, 0, 0])], 3)


def test_complement_complex():
    w = np.exp(2j * np.pi / 3)
    a, b, c = canonicalize([1, w, w * w]), canonicalize([1, 1, 1]), canonicalize([1, w * w, w])
    r = orthogonal_complement_ray([a, b], 3)
    assert r.allclose(c)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(ortho_tol=0)
    with pytest.raises(ValueError):
        Tolerance(gap_min=0.5)
    assert DEFAULT_TOL.rank_tol == 1e-6
