import numpy as np
import pytest

from ksrigidity.catalog import load_catalog
from ksrigidity.errors import InputError
from ksrigidity.graph import Basis, OrthoGraph, build_graph, enumerate_bases, graph_from_rays
from ksrigidity.reconstruct import propagate_reconstruct


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def _instance(rec):
    g = build_graph(rec)
    return g, enumerate_bases(g)


def test_triangle():
    g = OrthoGraph(3, frozenset({(0, 1), (0, 2), (1, 2)}), 3)
    r = propagate_reconstruct(g, [Basis((0, 1, 2))])
    assert r.consistency and r.parameters_introduced == 0


@pytest.mark.parametrize("name,count", [("cabello18", 0), ("kernaghan20", 0), ("schuette33", 0), ("peres33", 1)])
def test_counts(name, count, catalog):
    g, b = _instance(catalog[name])
    r = propagate_reconstruct(g, b, seed=3)
    assert r.consistency
    assert r.parameters_introduced == count
    # the rebuilt rays realise exactly the same graph
    assert graph_from_rays(r.rays, g.dim).edges == g.edges


def test_pinned_basis_is_standard(catalog):
    g, b = _instance(catalog["cabello18"])
    r = propagate_reconstruct(g, b)
    for k, v in enumerate(b[0].vertices):
        assert np.allclose(r.rays[v].vec, np.eye(4)[k])


def test_same_seed_same_rays(catalog):
    g, b = _instance(catalog["pavicic20"])
    r1, r2 = propagate_reconstruct(g, b, seed=5), propagate_reconstruct(g, b, seed=5)
    assert all(np.array_equal(a.vec, c.vec) for a, c in zip(r1.rays, r2.rays))


def test_disconnected_sums_components(catalog):
    g, _ = _instance(catalog["cabello18"])
    m = g.n_vertices
    double = OrthoGraph(2 * m, g.edges | frozenset((i + m, j + m) for i, j in g.edges), 4)
    r = propagate_reconstruct(double, enumerate_bases(double, check_projectors=False))
    assert r.consistency and r.parameters_introduced == 0
    assert graph_from_rays(r.rays, 4).edges == double.edges


def test_unrealisable_graph_is_inconsistent():
    # four mutually orthogonal rays cannot exist in dimension 3
    g = OrthoGraph(4, frozenset((i, j) for i in range(4) for j in range(i + 1, 4)), 3)
    r = propagate_reconstruct(g, [Basis((0, 1, 2))], retries=2)
    assert not r.consistency and r.rays is None and r.parameters_introduced is None


def test_needs_a_basis():
    g = OrthoGraph(2, frozenset({(0, 1)}), 3)
    with pytest.raises(InputError):
        propagate_reconstruct(g, [])
