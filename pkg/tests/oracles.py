"""Slow reference implementations used only by the tests."""

import random

import numpy as np

from ksrigidity.graph import Basis


def brute_force_colourable(n_vertices, edges, bases) -> bool:
    """Try all 2^n 0/1 assignments (vectorised; fine up to ~22 vertices)."""
    x = np.arange(2 ** n_vertices, dtype=np.int64)
    ok = np.ones_like(x, dtype=bool)
    for i, j in edges:
        ok &= ((x >> i) & (x >> j) & 1) == 0
    for b in bases:
        ones = sum(((x >> v) & 1) for v in b)
        ok &= ones == 1
    return bool(ok.any())


def random_sub_instances(graph, bases, count, max_size, seed):
    """Induced subgraphs with the bases lying entirely inside them."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        size = rng.randint(max(graph.dim, max_size // 2), min(max_size, graph.n_vertices))
        # grow from whole bases so the instance keeps some structure
        keep: set[int] = set()
        order = list(bases)
        rng.shuffle(order)
        for b in order:
            if len(keep | set(b.vertices)) <= size:
                keep |= set(b.vertices)
        keep = sorted(keep)
        index = {v: k for k, v in enumerate(keep)}
        sub = graph.induced(keep)
        sub_bases = [Basis(tuple(index[v] for v in b.vertices)) for b in bases
                     if all(v in index for v in b.vertices)]
        out.append((sub, sub_bases))
    return out


def relabelled(graph, bases, seed, drop=None):
    """A shuffled copy of the instance, optionally minus one vertex."""
    rng = random.Random(seed)
    keep = [v for v in range(graph.n_vertices) if v != drop]
    rng.shuffle(keep)
    index = {v: k for k, v in enumerate(keep)}
    sub = graph.induced(keep)
    sub_bases = [Basis(tuple(index[v] for v in b.vertices)) for b in bases
                 if all(v in index for v in b.vertices)]
    return sub, sub_bases
