import numpy as np
import pytest

from ifsdim import (GraphFormatError, MWGraph, PointCloud, QuadraticMap,
                    bounds_pipeline, build_initial_regions)
from ifsdim.fileio import (read_cloud, read_graph, read_regions,
                           report_to_dict, write_cloud, write_graph,
                           write_levels_tsv, write_regions)


class TestGraphRoundTrip:
    def test_identity_with_labels_and_lower(self, tmp_path):
        g = MWGraph.from_edges(
            3,
            [(0, 1, 0.5, 0.25), (1, 2, 1.0 / 3.0, 0.2), (2, 0, 0.7, 0.7),
             (1, 1, 0.9999999999999999, 0.1)],
            labels=("alpha", "beta", "gamma"))
        p = tmp_path / "g.graph"
        write_graph(g, p)
        assert read_graph(p) == g

    def test_identity_plain(self, tmp_path):
        g = MWGraph.from_edges(2, [(0, 1, 0.123456789012345678), (1, 0, 0.5)])
        p = tmp_path / "g.graph"
        write_graph(g, p)
        back = read_graph(p)
        assert back == g
        assert back.labels is None

    def test_rewrite_is_byte_identical(self, tmp_path):
        g = MWGraph.from_edges(2, [(0, 1, 0.3), (1, 0, 2.0 / 3.0)],
                               labels=("u", "v"))
        a, b = tmp_path / "a", tmp_path / "b"
        write_graph(g, a)
        write_graph(read_graph(a), b)
        assert a.read_bytes() == b.read_bytes()

    def test_comments_and_blanks_ignored(self, tmp_path):
        p = tmp_path / "g.graph"
        p.write_text("# a comment\n\n2\n0 1 0.5  # inline\n\n1 0 0.25\n")
        g = read_graph(p)
        assert g.n_vertices == 2 and g.n_edges == 2

    def test_julia_base_graph_round_trips(self, tmp_path):
        _, g, _ = build_initial_regions(QuadraticMap(complex(-0.5, 0.0)))
        p = tmp_path / "base.graph"
        write_graph(g, p)
        assert read_graph(p) == g


class TestGraphErrors:
    def check(self, tmp_path, text, lineno):
        p = tmp_path / "bad.graph"
        p.write_text(text)
        with pytest.raises(GraphFormatError) as exc:
            read_graph(p)
        assert exc.value.line == lineno
        return exc.value

    def test_bad_ratio_line_number(self, tmp_path):
        self.check(tmp_path, "2\n0 1 0.5\n1 0 abc\n", 3)

    def test_bad_vertex_count(self, tmp_path):
        self.check(tmp_path, "two\n0 1 0.5\n", 1)

    def test_wrong_field_count(self, tmp_path):
        self.check(tmp_path, "2\n0 1\n", 2)

    def test_mixed_lower_columns(self, tmp_path):
        self.check(tmp_path, "2\n0 1 0.5 0.25\n1 0 0.5\n", 3)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.graph"
        p.write_text("")
        with pytest.raises(GraphFormatError):
            read_graph(p)

    def test_out_of_range_vertex(self, tmp_path):
        p = tmp_path / "oob.graph"
        p.write_text("2\n0 5 0.5\n1 0 0.5\n")
        with pytest.raises(GraphFormatError):
            read_graph(p)

    def test_label_count_mismatch(self, tmp_path):
        p = tmp_path / "l.graph"
        p.write_text("# labels: a b c\n2\n0 1 0.5\n1 0 0.5\n")
        with pytest.raises(GraphFormatError):
            read_graph(p)


class TestCloudRoundTrip:
    def test_values_survive(self, tmp_path):
        pts = np.array([0.25 + 0.5j, -1.0 - 2.0j, 1e-17 + 0j])
        cloud = PointCloud(pts, seed=3, burn_in=16, branch_resets=1)
        p = tmp_path / "cloud.txt"
        write_cloud(cloud, p)
        back = read_cloud(p)
        np.testing.assert_allclose(back.points, pts, rtol=1e-16, atol=1e-300)

    def test_plain_array_accepted(self, tmp_path):
        p = tmp_path / "cloud.txt"
        write_cloud(np.array([1.0 + 1j]), p)
        back = read_cloud(p)
        assert back.n == 1

    def test_empty_cloud(self, tmp_path):
        p = tmp_path / "cloud.txt"
        write_cloud(PointCloud(np.empty(0, dtype=complex)), p)
        back = read_cloud(p)
        assert back.n == 0

    def test_bad_column_count(self, tmp_path):
        p = tmp_path / "cloud.txt"
        p.write_text("1.0 2.0 3.0\n")
        with pytest.raises(GraphFormatError):
            read_cloud(p)


class TestRegionRoundTrip:
    def test_level0_and_level1(self, tmp_path):
        regions, _, _ = build_initial_regions(QuadraticMap(complex(-0.5, 0)),
                                              samples_per_side=16)
        p = tmp_path / "regions.txt"
        write_regions(regions, p)
        back = read_regions(p)
        assert len(back) == 4
        for a, b in zip(regions, back):
            assert (a.path, a.home, a.label) == (b.path, b.home, b.label)
            np.testing.assert_array_equal(a.boundary, b.boundary)

    def test_header_parsing(self, tmp_path):
        p = tmp_path / "regions.txt"
        p.write_text("# region A:1-3 home=0 path=1-3\n1.0 0.0\n0.0 1.0\n")
        (reg,) = read_regions(p)
        assert reg.path == (1, 3)
        assert reg.home == 0
        assert reg.label == "A:1-3"

    def test_point_outside_block_rejected(self, tmp_path):
        p = tmp_path / "regions.txt"
        p.write_text("1.0 0.0\n")
        with pytest.raises(GraphFormatError):
            read_regions(p)

    def test_missing_home_rejected(self, tmp_path):
        p = tmp_path / "regions.txt"
        p.write_text("# region A path=1\n1.0 0.0\n")
        with pytest.raises(GraphFormatError):
            read_regions(p)


@pytest.fixture(scope="module")
def report():
    return bounds_pipeline(QuadraticMap(complex(-0.5, 0.0)), 1)


class TestReports:
    def test_levels_tsv(self, report, tmp_path):
        p = tmp_path / "levels.tsv"
        write_levels_tsv(report, p)
        lines = p.read_text().strip().split("\n")
        assert lines[0].split("\t") == ["level", "nodes", "s2", "s1",
                                        "width", "seconds"]
        assert len(lines) == 3
        first = lines[1].split("\t")
        assert first[0] == "0" and first[1] == "4"
        assert float(first[2]) == pytest.approx(report.levels[0].s_lower,
                                                rel=1e-11)

    def test_report_dict_shape(self, report):
        doc = report_to_dict(report)
        assert doc["c"] == [-0.5, 0.0]
        assert doc["parallelogram"]["q"] == pytest.approx(0.5 ** 0.5)
        assert len(doc["levels"]) == 2
        lv = doc["levels"][1]
        assert lv["nodes"] == 8
        assert lv["s_lower"] < lv["s_upper"]
        assert lv["lower"]["evaluations"] > 0
        assert doc["failure"] is None
        assert doc["final_bracket"] == [report.levels[-1].s_lower,
                                        report.levels[-1].s_upper]

    def test_failure_dict_is_json_safe(self):
        import json
        rep = bounds_pipeline(QuadraticMap(complex(2.0, 0.0)), 1)
        doc = report_to_dict(rep)
        text = json.dumps(doc, allow_nan=False)  # no NaN tokens allowed
        assert json.loads(text)["failure"]["error"] == "GeometryError"
        assert json.loads(text)["parallelogram"]["p"] is None
