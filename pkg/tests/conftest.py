import numpy as np
import pytest

from ifsdim import (MWGraph, QuadraticMap, empty_path, make_path,
                    path_concat)


def random_contracting_graph(rng, n_max=6, r_lo=0.2, r_hi=0.9, extra=4,
                             with_lower=False, min_out=1):
    """Random strongly connected graph with ratios in [r_lo, r_hi).

    A permutation cycle through every vertex guarantees strong
    connectivity; extra edges and out-degree padding go on top.
    """
    n = int(rng.integers(2, n_max + 1))
    perm = [int(x) for x in rng.permutation(n)]
    arcs = [(perm[i], perm[(i + 1) % n]) for i in range(n)]
    for _ in range(int(rng.integers(0, extra + 1))):
        arcs.append((int(rng.integers(n)), int(rng.integers(n))))
    deg = np.zeros(n, dtype=int)
    for u, _ in arcs:
        deg[u] += 1
    for u in range(n):
        while deg[u] < min_out:
            arcs.append((u, int(rng.integers(n))))
            deg[u] += 1
    rows = []
    for u, v in arcs:
        r = float(rng.uniform(r_lo, r_hi))
        if with_lower:
            rows.append((u, v, r, float(rng.uniform(0.5 * r, r))))
        else:
            rows.append((u, v, r))
    return MWGraph.from_edges(n, rows)


def shortest_cycle(graph, v):
    """A minimum-length nonempty cycle at v, by breadth-first search."""
    frontier = [empty_path(graph, v)]
    while True:
        nxt = []
        for p in frontier:
            for e in graph.out_edges(p.target):
                q = path_concat(graph, p, make_path(graph, [e]))
                if q.target == v:
                    return q
                nxt.append(q)
        frontier = nxt


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


@pytest.fixture(scope="session")
def qmap_half():
    """The fully supported parameter: z^2 - 1/2."""
    return QuadraticMap(complex(-0.5, 0.0))
