"""Text file formats: ratio graphs, point clouds, region boundaries, reports.

Graph files: vertex count on the first data line, then one edge per line as
``source target ratio_upper [ratio_lower]``.  ``#`` starts a comment; a
``# labels:`` comment written by the exporter round-trips vertex labels.
Floats are written with repr precision so write -> parse is the identity.

Clouds are two-column decimal text (re im).  Region files hold one block
per region: a ``# region`` header line followed by ``re im`` rows.
"""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path as _FsPath

import numpy as np

from .boxdim import PointCloud
from .errors import GraphFormatError
from .graphs import MWGraph
from .julia import Region

_LABELS_PREFIX = "# labels:"


def _fmt(x):
    return repr(float(x))


def write_graph(graph, path):
    """Write a graph in the edge-list text format (see module docstring)."""
    lines = ["# ratio graph: vertices, then `source target ratio_upper"
             " [ratio_lower]` per edge"]
    if graph.labels is not None:
        lines.append(_LABELS_PREFIX + " " + " ".join(graph.labels))
    lines.append(str(graph.n_vertices))
    both = graph.lower_ratios is not None
    for e in range(graph.n_edges):
        row = f"{graph.sources[e]} {graph.targets[e]} {_fmt(graph.ratios[e])}"
        if both:
            row += f" {_fmt(graph.lower_ratios[e])}"
        lines.append(row)
    _FsPath(path).write_text("\n".join(lines) + "\n")


def read_graph(path):
    """Parse a graph file; raises GraphFormatError with the offending line."""
    labels = None
    n_vertices = None
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if stripped.startswith(_LABELS_PREFIX):
                labels = stripped[len(_LABELS_PREFIX):].split()
                continue
            if "#" in stripped:
                stripped = stripped[:stripped.index("#")].strip()
            if not stripped:
                continue
            fields = stripped.split()
            if n_vertices is None:
                if len(fields) != 1:
                    raise GraphFormatError(
                        "expected the vertex count alone", line=lineno)
                try:
                    n_vertices = int(fields[0])
                except ValueError:
                    raise GraphFormatError(
                        f"vertex count {fields[0]!r} is not an integer",
                        line=lineno) from None
                continue
            if len(fields) not in (3, 4):
                raise GraphFormatError(
                    f"expected `source target ratio [lower]`, got "
                    f"{len(fields)} fields", line=lineno)
            try:
                s, t = int(fields[0]), int(fields[1])
                r = float(fields[2])
                rl = float(fields[3]) if len(fields) == 4 else None
            except ValueError as exc:
                raise GraphFormatError(str(exc), line=lineno) from None
            rows.append((lineno, s, t, r, rl))
    if n_vertices is None:
        raise GraphFormatError("no vertex count found")
    has_lower = [rl is not None for _, _, _, _, rl in rows]
    if any(has_lower) and not all(has_lower):
        bad = next(lineno for (lineno, *_), h in zip(rows, has_lower) if not h)
        raise GraphFormatError(
            "either every edge carries a lower ratio or none does", line=bad)
    if labels is not None and len(labels) != n_vertices:
        raise GraphFormatError(
            f"{len(labels)} labels for {n_vertices} vertices")
    try:
        if rows and all(has_lower):
            edges = [(s, t, r, rl) for _, s, t, r, rl in rows]
        else:
            edges = [(s, t, r) for _, s, t, r, _ in rows]
        return MWGraph.from_edges(n_vertices, edges, labels=labels)
    except Exception as exc:
        raise GraphFormatError(str(exc)) from None


def write_cloud(cloud, path):
    """Two-column text (re im), with the generator settings as comments."""
    header = []
    if isinstance(cloud, PointCloud):
        header.append(f"seed={cloud.seed} burn_in={cloud.burn_in} "
                      f"branch_resets={cloud.branch_resets} n={cloud.n}")
        pts = cloud.points
    else:
        pts = np.asarray(cloud, dtype=complex)
    data = np.column_stack([pts.real, pts.imag])
    np.savetxt(path, data, fmt="%.17g", header="\n".join(header) or "cloud")


def read_cloud(path):
    with warnings.catch_warnings():
        # an empty cloud file is valid; silence loadtxt's empty-input warning
        warnings.simplefilter("ignore", UserWarning)
        data = np.loadtxt(path, ndmin=2)
    if data.size == 0:
        return PointCloud(np.empty(0, dtype=complex))
    if data.shape[1] != 2:
        raise GraphFormatError(
            f"cloud file must have two columns, got {data.shape[1]}")
    return PointCloud(data[:, 0] + 1j * data[:, 1])


def write_regions(regions, path):
    """Region boundaries, one `# region` block per region."""
    chunks = []
    for reg in regions:
        head = f"# region {reg.label} home={reg.home}"
        if reg.path:
            head += " path=" + "-".join(str(e) for e in reg.path)
        rows = "\n".join(f"{_fmt(z.real)} {_fmt(z.imag)}"
                         for z in reg.boundary)
        chunks.append(head + "\n" + rows)
    _FsPath(path).write_text("\n\n".join(chunks) + "\n")


def read_regions(path):
    regions = []
    head = None
    rows = []

    def flush():
        nonlocal head, rows
        if head is None:
            return
        home, path_ids = head
        pts = np.array([complex(a, b) for a, b in rows])
        regions.append(Region(path=path_ids, home=home, boundary=pts))
        head, rows = None, []

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if stripped.startswith("# region"):
                flush()
                home = None
                path_ids = ()
                for tok in stripped.split():
                    if tok.startswith("home="):
                        home = int(tok[5:])
                    elif tok.startswith("path="):
                        path_ids = tuple(int(x) for x in tok[5:].split("-"))
                if home is None:
                    raise GraphFormatError("region header without home=",
                                           line=lineno)
                head = (home, path_ids)
                continue
            if stripped.startswith("#") or not stripped:
                continue
            fields = stripped.split()
            if len(fields) != 2 or head is None:
                raise GraphFormatError("expected `re im` inside a region block",
                                       line=lineno)
            try:
                rows.append((float(fields[0]), float(fields[1])))
            except ValueError as exc:
                raise GraphFormatError(str(exc), line=lineno) from None
    flush()
    return regions


def write_levels_tsv(report, path):
    """Per-level bracket table: level, nodes, s2, s1, width, seconds."""
    lines = ["level\tnodes\ts2\ts1\twidth\tseconds"]
    for lv in report.levels:
        lines.append(f"{lv.level}\t{lv.n_vertices}\t{lv.s_lower:.12g}\t"
                     f"{lv.s_upper:.12g}\t{lv.width:.12g}\t{lv.seconds:.3f}")
    _FsPath(path).write_text("\n".join(lines) + "\n")


def report_to_dict(report):
    """JSON-ready structure for a BoundsReport."""
    def dim(d):
        return {
            "s": d.s,
            "bracket": list(d.bracket),
            "evaluations": d.evaluations,
            "spectral_iterations": sum(x.iterations for x in d.samples),
        }

    def num(x):  # geometry failure leaves p, q unset; emit valid JSON
        return None if math.isnan(x) else x

    doc = {
        "c": [report.c.real, report.c.imag],
        "parallelogram": {"p": num(report.p), "q": num(report.q)},
        "samples_per_side": report.samples_per_side,
        "slack": report.slack,
        "bound_mode": report.bound_mode,
        "tol": report.tol,
        "levels": [
            {
                "level": lv.level,
                "nodes": lv.n_vertices,
                "edges": lv.n_edges,
                "s_lower": lv.s_lower,
                "s_upper": lv.s_upper,
                "width": lv.width,
                "seconds": lv.seconds,
                "lower": dim(lv.lower),
                "upper": dim(lv.upper),
                "warnings": list(lv.warnings),
            }
            for lv in report.levels
        ],
        "failure": report.failure,
    }
    if report.final_bracket is not None:
        doc["final_bracket"] = list(report.final_bracket)
    return doc


def write_report_json(report, path):
    _FsPath(path).write_text(json.dumps(report_to_dict(report), indent=2)
                             + "\n")


def write_box_estimate(estimate, path, bracket=None):
    """(delta, count) rows followed by a summary comment block."""
    lines = ["delta\tcount"]
    for d, n in zip(estimate.deltas, estimate.counts):
        lines.append(f"{d:.12g}\t{n}")
    lines.append(f"# slope = {estimate.slope:.12g}")
    lines.append(f"# intercept = {estimate.intercept:.12g}")
    lines.append(f"# rms_residual = {estimate.rms_residual:.12g}")
    if bracket is not None:
        lo, hi = bracket
        inside = lo <= estimate.slope <= hi
        lines.append(f"# bracket = [{lo:.12g}, {hi:.12g}] -> "
                     f"{'inside' if inside else 'OUTSIDE'}")
    _FsPath(path).write_text("\n".join(lines) + "\n")
