import itertools
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ksrigidity.catalog import CATALOG_NAMES, load_catalog
from ksrigidity.errors import CliqueNotBasisError, LabelError
from ksrigidity.graph import (
    Basis, OrthoGraph, build_graph, enumerate_bases, graph_isomorphic, is_isomorphism, to_dot,
)
from ksrigidity.rays import canonicalize


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def _nx(g: OrthoGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n_vertices))
    h.add_edges_from(g.edges)
    return h


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_edges_match_brute_force(name, catalog):
    rec = catalog[name]
    g = build_graph(rec)
    brute = {(i, j) for i, j in itertools.combinations(range(len(rec.rays)), 2)
             if abs(np.vdot(rec.rays[i].vec, rec.rays[j].vec)) <= 1e-9}
    assert g.edges == brute


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_bases_match_networkx(name, catalog):
    g = build_graph(catalog[name])
    ours = {b.vertices for b in enumerate_bases(g)}
    theirs = {tuple(sorted(c)) for c in nx.enumerate_all_cliques(_nx(g)) if len(c) == g.dim}
    assert ours == theirs


def test_bases_sorted(catalog):
    bases = enumerate_bases(build_graph(catalog["peres33"]))
    assert bases == sorted(bases)


def test_fake_clique_rejected():
    rays = tuple(canonicalize(v) for v in ([1, 0, 0], [1, 1, 0], [0, 1, 1]))
    g = OrthoGraph(3, frozenset({(0, 1), (0, 2), (1, 2)}), 3, rays)
    with pytest.raises(CliqueNotBasisError):
        enumerate_bases(g)


def test_peres_penrose_isomorphic(catalog):
    g1, g2 = build_graph(catalog["peres33"]), build_graph(catalog["penrose33"])
    m = graph_isomorphic(g1, g2)
    assert m is not None and is_isomorphism(g1, g2, m)


def test_peres_schuette_not_isomorphic(catalog):
    assert graph_isomorphic(build_graph(catalog["peres33"]), build_graph(catalog["schuette33"])) is None


def test_relabelled_copy(catalog):
    g = build_graph(catalog["pavicic24"])
    perm = list(range(g.n_vertices))
    random.Random(5).shuffle(perm)
    h = g.relabeled(perm)
    m = graph_isomorphic(g, h)
    assert m is not None and is_isomorphism(g, h, m)


def test_kernaghan_pavicic20(catalog):
    g1, g2 = build_graph(catalog["kernaghan20"]), build_graph(catalog["pavicic20"])
    assert (graph_isomorphic(g1, g2) is not None) == nx.is_isomorphic(_nx(g1), _nx(g2))


graphs = st.integers(1, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]))))


@settings(max_examples=150, deadline=None)
@given(graphs, graphs)
def test_isomorphism_agrees_with_networkx(a, b):
    g1 = OrthoGraph(a[0], frozenset(a[1]), 3)
    g2 = OrthoGraph(b[0], frozenset(b[1]), 3)
    m = graph_isomorphic(g1, g2)
    assert (m is not None) == nx.is_isomorphic(_nx(g1), _nx(g2))
    if m is not None:
        assert is_isomorphism(g1, g2, m)


@settings(max_examples=50, deadline=None)
@given(graphs, st.randoms(use_true_random=False))
def test_isomorphic_to_own_relabelling(a, rnd):
    g = OrthoGraph(a[0], frozenset(a[1]), 3)
    perm = list(range(a[0]))
    rnd.shuffle(perm)
    assert graph_isomorphic(g, g.relabeled(perm)) is not None


def test_dot_triangle():
    g = OrthoGraph(3, frozenset({(0, 1), (1, 2), (0, 2)}), 3)
    text = to_dot(g, name="triad")
    assert text.count(" -- ") == 3
    assert text.startswith('graph "triad" {')
    assert text == to_dot(g, name="triad")


def test_dot_labels():
    g = OrthoGraph(2, frozenset({(0, 1)}), 3)
    assert 'label="a\\"b"' in to_dot(g, labels=['a"b', "c"])
    with pytest.raises(LabelError):
        to_dot(g, labels=["x"])


def test_basis_normalises_order():
    assert Basis((3, 1, 2)).vertices == (1, 2, 3)


def test_induced():
    g = OrthoGraph(4, frozenset({(0, 1), (1, 2), (2, 3)}), 3)
    assert g.induced([1, 2, 3]).edges == frozenset({(0, 1), (1, 2)})
