import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifsdim import (MWGraph, ValidationError, augment_with_cycles,
                    cross_cut_below, cylinder_measure, empty_path,
                    enumerate_paths, make_path, path_concat, path_ratio,
                    perron_data, solve_dimension, validate)
from ifsdim.graphs import is_contracting, is_strongly_connected

from conftest import random_contracting_graph, shortest_cycle


def two_vertex():
    return MWGraph.from_edges(2, [(0, 1, 0.5), (1, 0, 0.4), (1, 1, 0.3)])


def moran(n, r):
    # n similar copies of ratio r on a single vertex
    return MWGraph.from_edges(1, [(0, 0, r)] * n)


class TestConstruction:
    def test_basic_fields(self):
        g = two_vertex()
        assert g.n_vertices == 2
        assert g.n_edges == 3
        assert g.sources.tolist() == [0, 1, 1]
        assert g.targets.tolist() == [1, 0, 1]
        assert g.ratios.tolist() == [0.5, 0.4, 0.3]
        assert g.lower_ratios is None

    def test_arrays_are_readonly(self):
        g = two_vertex()
        with pytest.raises(ValueError):
            g.ratios[0] = 0.9

    def test_lower_ratios(self):
        g = MWGraph.from_edges(1, [(0, 0, 0.5, 0.25), (0, 0, 0.5, 0.3)])
        assert g.lower_ratios.tolist() == [0.25, 0.3]
        assert g.ratio_array("lower").tolist() == [0.25, 0.3]
        assert g.ratio_array("upper").tolist() == [0.5, 0.5]

    def test_lower_missing_raises(self):
        with pytest.raises(ValidationError):
            two_vertex().ratio_array("lower")

    def test_mixed_lower_rejected(self):
        with pytest.raises(ValueError):
            MWGraph.from_edges(1, [(0, 0, 0.5, 0.25), (0, 0, 0.5)])

    def test_bad_ratio_rejected(self):
        for r in (0.0, -0.5, float("nan"), float("inf")):
            with pytest.raises(ValueError):
                MWGraph.from_edges(1, [(0, 0, r)])

    def test_bad_vertex_rejected(self):
        with pytest.raises(ValueError):
            MWGraph.from_edges(2, [(0, 2, 0.5)])
        with pytest.raises(ValueError):
            MWGraph.from_edges(2, [(-1, 0, 0.5)])

    def test_lower_above_upper_rejected(self):
        with pytest.raises(ValueError):
            MWGraph.from_edges(1, [(0, 0, 0.3, 0.4)])

    def test_equality(self):
        assert two_vertex() == two_vertex()
        assert two_vertex() != moran(3, 0.3)
        g = MWGraph.from_edges(2, [(0, 1, 0.5), (1, 0, 0.4), (1, 1, 0.31)])
        assert two_vertex() != g

    def test_multigraph_parallel_edges(self):
        g = MWGraph.from_edges(2, [(0, 1, 0.5), (0, 1, 0.25), (1, 0, 0.5)])
        assert g.n_edges == 3
        assert g.out_degree(0) == 2


class TestConnectivity:
    def test_two_vertex_strong(self):
        assert is_strongly_connected(two_vertex())

    def test_one_way_not_strong(self):
        g = MWGraph.from_edges(2, [(0, 1, 0.5), (1, 1, 0.5)])
        assert not is_strongly_connected(g)

    def test_random_generator_always_strong(self, rng):
        for _ in range(25):
            assert is_strongly_connected(random_contracting_graph(rng))

    def test_validate_report(self):
        g = MWGraph.from_edges(2, [(0, 1, 0.5), (1, 1, 0.5)])
        rep = validate(g)
        assert not rep.strongly_connected
        assert not rep.ok
        assert rep.min_out_degree == 1
        assert rep.ratios_contracting
        assert any("strongly connected" in msg for msg in rep.issues)

    def test_validate_flags_thin_out_degree(self):
        rep = validate(two_vertex())
        assert rep.strongly_connected and rep.ratios_contracting
        assert not rep.ok
        assert any("out-degree" in msg for msg in rep.issues)

    def test_validate_ok(self):
        g = MWGraph.from_edges(2, [(0, 1, 0.5), (0, 0, 0.4), (1, 0, 0.4),
                                   (1, 1, 0.3)])
        rep = validate(g)
        assert rep.ok and rep.issues == ()


class TestContraction:
    def test_all_below_one(self):
        assert is_contracting(two_vertex())

    def test_unit_loop_not_contracting(self):
        g = MWGraph.from_edges(1, [(0, 0, 1.0)])
        assert not is_contracting(g)

    def test_expanding_edge_on_contracting_cycle(self):
        # 2.0 * 0.4 = 0.8 < 1 around the only cycle
        g = MWGraph.from_edges(2, [(0, 1, 2.0), (1, 0, 0.4)])
        assert is_contracting(g)

    def test_expanding_cycle(self):
        g = MWGraph.from_edges(2, [(0, 1, 2.0), (1, 0, 0.6)])
        assert not is_contracting(g)

    def test_unit_product_cycle(self):
        g = MWGraph.from_edges(2, [(0, 1, 2.0), (1, 0, 0.5)])
        assert not is_contracting(g)

    def test_matches_cycle_enumeration(self, rng):
        # oracle: max cycle product using the largest parallel ratio per
        # arc (a cycle product under any parallel choice is dominated by
        # the max choice)
        nx = pytest.importorskip("networkx")
        for _ in range(20):
            g = random_contracting_graph(rng, n_max=5, r_lo=0.3, r_hi=1.6)
            maxr = {}
            for e in range(g.n_edges):
                key = (int(g.sources[e]), int(g.targets[e]))
                maxr[key] = max(maxr.get(key, 0.0), float(g.ratios[e]))
            dg = nx.DiGraph(maxr.keys())
            worst = max(
                np.prod([maxr[(cyc[i], cyc[(i + 1) % len(cyc)])]
                         for i in range(len(cyc))])
                for cyc in nx.simple_cycles(dg))
            assert is_contracting(g) == (worst < 1.0)


class TestPaths:
    def test_empty_path(self):
        g = two_vertex()
        p = empty_path(g, 1)
        assert p.is_empty and p.length == 0
        assert p.source == p.target == 1
        assert path_ratio(g, p) == 1.0

    def test_make_and_ratio(self):
        g = two_vertex()
        p = make_path(g, [0, 2, 1])  # 0->1, 1->1, 1->0
        assert p.source == 0 and p.target == 0 and p.length == 3
        assert path_ratio(g, p) == pytest.approx(0.5 * 0.3 * 0.4, rel=1e-15)

    def test_non_consecutive_rejected(self):
        g = two_vertex()
        with pytest.raises(ValueError):
            make_path(g, [0, 0])  # 0->1 then 0->1 again

    def test_concat(self):
        g = two_vertex()
        a = make_path(g, [0])
        b = make_path(g, [2, 1])
        ab = path_concat(g, a, b)
        assert ab.edges == (0, 2, 1)
        assert path_concat(g, empty_path(g, 0), a) == a

    def test_concat_mismatch(self):
        g = two_vertex()
        with pytest.raises(ValueError):
            path_concat(g, make_path(g, [0]), make_path(g, [0]))

    @given(st.integers(0, 6), st.integers(0, 6))
    @settings(max_examples=30, deadline=None)
    def test_ratio_multiplicative(self, i, j):
        # r(ab) == r(a) r(b) whenever the concatenation exists
        g = two_vertex()
        paths3 = enumerate_paths(g, 0, 3)
        paths2 = [p for p in enumerate_paths(g, 0, 2)] + [
            p for p in enumerate_paths(g, 1, 2)]
        a = paths3[i % len(paths3)]
        b = paths2[j % len(paths2)]
        if a.target != b.source:
            return
        ab = path_concat(g, a, b)
        assert path_ratio(g, ab) == pytest.approx(
            path_ratio(g, a) * path_ratio(g, b), rel=1e-12)

    def test_enumeration_counts(self):
        # moran(3): 3^L paths of length L from the single vertex
        g = moran(3, 0.3)
        for L in range(5):
            assert len(enumerate_paths(g, 0, L)) == 3 ** L

    def test_enumeration_lexicographic(self):
        g = moran(2, 0.4)
        got = [p.edges for p in enumerate_paths(g, 0, 2)]
        assert got == [(0, 0), (0, 1), (1, 0), (1, 1)]


class TestCrossCut:
    def cut_oracle(self, g, delta, max_len=64):
        # brute force: extend every path until its ratio first drops
        # below delta
        out = []
        stack = [empty_path(g, u) for u in range(g.n_vertices)]
        while stack:
            p = stack.pop()
            if not p.is_empty and path_ratio(g, p) < delta:
                out.append(p)
                continue
            assert p.length < max_len, "oracle runaway"
            for e in g.out_edges(p.target):
                stack.append(path_concat(g, p, make_path(g, [e])))
        return sorted(out, key=lambda p: (p.source, p.edges))

    def test_matches_brute_force(self, rng):
        for _ in range(10):
            g = random_contracting_graph(rng, n_max=4, r_lo=0.3, r_hi=0.8,
                                         extra=2)
            for delta in (0.5, 0.2, 0.07):
                cut = cross_cut_below(g, delta)
                got = sorted(cut.paths, key=lambda p: (p.source, p.edges))
                assert got == self.cut_oracle(g, delta)

    def test_sandwich(self, rng):
        for _ in range(10):
            g = random_contracting_graph(rng, r_lo=0.25, r_hi=0.85)
            r_min = float(g.ratios.min())
            for delta in (0.6, 0.1, 0.02):
                cut = cross_cut_below(g, delta)
                assert cut.delta == delta
                for p in cut.paths:
                    r = path_ratio(g, p)
                    assert delta * r_min <= r < delta
                    # parent still at or above delta
                    parent = make_path(g, p.edges[:-1], at=p.source)
                    assert path_ratio(g, parent) >= delta

    def test_incomparable(self, rng):
        # no cut path is a proper prefix of another from the same vertex
        g = random_contracting_graph(rng, n_max=3, r_lo=0.4, r_hi=0.8)
        cut = cross_cut_below(g, 0.15)
        by_vertex = {}
        for p in cut.paths:
            by_vertex.setdefault(p.source, []).append(p.edges)
        for edges in by_vertex.values():
            for a, b in itertools.permutations(edges, 2):
                assert a[:len(b)] != b

    def test_partitions_long_paths(self, rng):
        # every length-L path has exactly one cut element as a prefix
        g = random_contracting_graph(rng, n_max=3, r_lo=0.35, r_hi=0.7,
                                     extra=1)
        delta = 0.1
        cut = cross_cut_below(g, delta)
        # L large enough that every length-L ratio is below delta
        L = 1
        while float(g.ratios.max()) ** L >= delta * float(g.ratios.min()):
            L += 1
        prefixes = {(p.source, p.edges) for p in cut.paths}
        for u in range(g.n_vertices):
            for p in enumerate_paths(g, u, L):
                hits = [k for k in range(1, L + 1)
                        if (u, p.edges[:k]) in prefixes]
                assert len(hits) == 1

    def test_delta_validation(self):
        g = two_vertex()
        with pytest.raises(ValidationError):
            cross_cut_below(g, 0.0)
        with pytest.raises(ValidationError):
            cross_cut_below(g, 1.5)

    def test_expanding_edge_refused(self):
        g = MWGraph.from_edges(2, [(0, 1, 2.0), (1, 0, 0.4)])
        with pytest.raises(ValidationError):
            cross_cut_below(g, 0.5)


class TestCylinderMeasure:
    def test_additivity(self):
        # measure of a cylinder equals the sum over one-edge extensions
        g = two_vertex()
        res = solve_dimension(g, tol=1e-13)
        pd = perron_data(g, res.s)
        for p in enumerate_paths(g, 0, 3):
            children = [path_concat(g, p, make_path(g, [e]))
                        for e in g.out_edges(p.target)]
            total = sum(cylinder_measure(g, q, res.s, pd) for q in children)
            assert total == pytest.approx(cylinder_measure(g, p, res.s, pd),
                                          rel=1e-8)

    def test_cross_cut_identity(self, rng):
        # lambda_u = sum over the cut of r(alpha)^s lambda_target
        for _ in range(5):
            g = random_contracting_graph(rng, n_max=4, r_lo=0.3, r_hi=0.8)
            res = solve_dimension(g, tol=1e-13)
            pd = perron_data(g, res.s)
            cut = cross_cut_below(g, 0.05)
            for u in range(g.n_vertices):
                total = sum(
                    path_ratio(g, p) ** res.s * pd.eigenvector[p.target]
                    for p in cut.from_vertex(u))
                assert total == pytest.approx(pd.eigenvector[u], rel=1e-8)

    def test_rejects_non_perron_s(self):
        g = two_vertex()
        res = solve_dimension(g)
        pd = perron_data(g, res.s)
        bad = perron_data(g, res.s + 0.3)
        p = make_path(g, [0])
        cylinder_measure(g, p, res.s, pd)  # fine
        with pytest.raises(ValidationError):
            cylinder_measure(g, p, res.s + 0.3, bad)


class TestAugmentation:
    def test_moran_squared(self):
        # n=2 on a 2-copy moran system with a unit loop cycle choice:
        # every augmented edge is a length-2 path followed by the cycle
        g = moran(2, 0.5)
        cyc = make_path(g, [0])
        aug = augment_with_cycles(g, [cyc], 2)
        assert aug.n_vertices == 1
        assert aug.n_edges == 4
        assert np.allclose(aug.ratios, 0.5 ** 2 * 0.5)

    def test_vertex_and_ratio_structure(self, rng):
        g = random_contracting_graph(rng, n_max=4, r_lo=0.3, r_hi=0.8)
        cycles = [shortest_cycle(g, v) for v in range(g.n_vertices)]
        aug = augment_with_cycles(g, cycles, 2)
        assert aug.n_vertices == g.n_vertices
        # each augmented edge ratio is the path product times its cycle
        counted = 0
        for u in range(g.n_vertices):
            for p in enumerate_paths(g, u, 2):
                counted += 1
        assert aug.n_edges == counted
