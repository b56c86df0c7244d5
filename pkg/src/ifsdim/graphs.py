"""Directed multigraphs with ratio-labeled edges, paths and cross-cuts.

A Mauldin-Williams graph is a strongly connected directed multigraph with a
positive contraction ratio per edge.  This module holds the combinatorial
layer: graph construction and validation, path algebra (ratios are
multiplicative along paths), "first time less than delta" cross-cuts, the
natural cylinder measures, and the cycle-composition construction used to
squeeze a system into the strong open set condition.

Everything here is immutable after construction and all orderings are by
dense edge id, so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError


@dataclass(frozen=True)
class Vertex:
    id: int
    label: str | None = None


@dataclass(frozen=True)
class Edge:
    id: int
    source: int
    target: int


class MWGraph:
    """Directed multigraph with a positive ratio per edge.

    ``ratios`` are the (upper) contraction ratios; ``lower_ratios`` optionally
    carry a second system r'_e <= r_e used for lower dimension bounds.  Both
    are stored as read-only float arrays indexed by edge id.  Instances are
    immutable; derived data (out-edge lists) is precomputed.
    """

    __slots__ = ("n_vertices", "sources", "targets", "ratios", "lower_ratios",
                 "labels", "_out")

    def __init__(self, n_vertices, sources, targets, ratios,
                 lower_ratios=None, labels=None):
        n = int(n_vertices)
        if n < 1:
            raise ValidationError("graph needs at least one vertex")
        sources = np.ascontiguousarray(sources, dtype=np.int64)
        targets = np.ascontiguousarray(targets, dtype=np.int64)
        ratios = np.ascontiguousarray(ratios, dtype=np.float64)
        if not (sources.shape == targets.shape == ratios.shape) or sources.ndim != 1:
            raise ValidationError("sources, targets and ratios must be 1-d and aligned")
        if sources.size and (sources.min() < 0 or sources.max() >= n
                             or targets.min() < 0 or targets.max() >= n):
            raise ValidationError("edge endpoint out of range")
        if not np.all(np.isfinite(ratios)) or (ratios.size and ratios.min() <= 0.0):
            raise ValidationError("ratios must be finite and strictly positive")
        if lower_ratios is not None:
            lower_ratios = np.ascontiguousarray(lower_ratios, dtype=np.float64)
            if lower_ratios.shape != ratios.shape:
                raise ValidationError("lower_ratios must align with ratios")
            if not np.all(np.isfinite(lower_ratios)) or (
                    lower_ratios.size and lower_ratios.min() <= 0.0):
                raise ValidationError("lower ratios must be finite and strictly positive")
            if np.any(lower_ratios > ratios):
                raise ValidationError("lower ratios must not exceed upper ratios")
            lower_ratios.flags.writeable = False
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise ValidationError("need one label per vertex")
        for a in (sources, targets, ratios):
            a.flags.writeable = False

        self.n_vertices = n
        self.sources = sources
        self.targets = targets
        self.ratios = ratios
        self.lower_ratios = lower_ratios
        self.labels = labels
        out = [[] for _ in range(n)]
        for e in range(sources.size):
            out[sources[e]].append(e)
        self._out = tuple(np.array(ids, dtype=np.int64) for ids in out)

    @classmethod
    def from_edges(cls, n_vertices, edges, labels=None):
        """Build from an iterable of (source, target, ratio[, lower_ratio]).

        Edge ids are assigned in iteration order.  Either every tuple carries
        a lower ratio or none does.
        """
        src, tgt, up, lo = [], [], [], []
        for row in edges:
            if len(row) == 3:
                s, t, r = row
                rl = None
            elif len(row) == 4:
                s, t, r, rl = row
            else:
                raise ValidationError(f"edge tuple of length {len(row)}")
            src.append(s)
            tgt.append(t)
            up.append(r)
            lo.append(rl)
        has_lower = [x is not None for x in lo]
        if any(has_lower) and not all(has_lower):
            raise ValidationError("either all edges carry a lower ratio or none")
        lower = lo if all(has_lower) and lo else None
        return cls(n_vertices, src, tgt, up, lower_ratios=lower, labels=labels)

    @property
    def n_edges(self):
        return int(self.sources.size)

    def vertex(self, u):
        return Vertex(int(u), self.labels[u] if self.labels else None)

    def edge(self, e):
        return Edge(int(e), int(self.sources[e]), int(self.targets[e]))

    def out_edges(self, u):
        """Edge ids leaving u, ascending."""
        return self._out[u]

    def out_degree(self, u):
        return int(self._out[u].size)

    def ratio_array(self, which="upper"):
        if which == "upper":
            return self.ratios
        if which == "lower":
            if self.lower_ratios is None:
                raise ValidationError("graph carries no lower ratios")
            return self.lower_ratios
        raise ValueError(f"which must be 'upper' or 'lower', got {which!r}")

    def __eq__(self, other):
        if not isinstance(other, MWGraph):
            return NotImplemented
        if self.n_vertices != other.n_vertices or self.labels != other.labels:
            return False
        if not (np.array_equal(self.sources, other.sources)
                and np.array_equal(self.targets, other.targets)
                and np.array_equal(self.ratios, other.ratios)):
            return False
        if (self.lower_ratios is None) != (other.lower_ratios is None):
            return False
        return self.lower_ratios is None or np.array_equal(
            self.lower_ratios, other.lower_ratios)

    __hash__ = None

    def __repr__(self):
        lo = "+lower" if self.lower_ratios is not None else ""
        return f"MWGraph({self.n_vertices} vertices, {self.n_edges} edges{lo})"


def strongly_connected_components(n_vertices, sources, targets):
    """SCCs of a digraph given as parallel edge arrays (Kosaraju, iterative).

    Returns a list of vertex-id arrays; order is not significant.
    """
    n = int(n_vertices)
    fwd = [[] for _ in range(n)]
    rev = [[] for _ in range(n)]
    for s, t in zip(sources, targets):
        fwd[s].append(int(t))
        rev[t].append(int(s))

    order = []
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        # first pass: record finish order without recursion
        stack = [(root, iter(fwd[root]))]
        seen[root] = True
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, iter(fwd[v])))
                    advanced = True
                    break
            if not advanced:
                order.append(u)
                stack.pop()

    comp = [-1] * n
    n_comp = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        stack = [root]
        comp[root] = n_comp
        while stack:
            u = stack.pop()
            for v in rev[u]:
                if comp[v] == -1:
                    comp[v] = n_comp
                    stack.append(v)
        n_comp += 1
    groups = [[] for _ in range(n_comp)]
    for u, cid in enumerate(comp):
        groups[cid].append(u)
    return [np.array(g, dtype=np.int64) for g in groups]


def is_strongly_connected(graph):
    return len(strongly_connected_components(
        graph.n_vertices, graph.sources, graph.targets)) == 1


@dataclass(frozen=True)
class ValidationReport:
    strongly_connected: bool
    min_out_degree: int
    ratios_contracting: bool
    lower_consistent: bool
    issues: tuple[str, ...]

    @property
    def ok(self):
        return not self.issues


def validate(graph):
    """Structural diagnostics; callers decide whether to proceed.

    Checks strong connectivity, per-vertex out-degree >= 2, all ratios in
    (0, 1), and (when present) lower ratios in (0, 1) with r'_e <= r_e.
    """
    issues = []
    sc = is_strongly_connected(graph)
    if not sc:
        issues.append("graph is not strongly connected")
    min_deg = min(graph.out_degree(u) for u in range(graph.n_vertices))
    if min_deg < 2:
        issues.append(f"minimum out-degree is {min_deg}, expected >= 2")
    contracting = bool(graph.n_edges == 0 or graph.ratios.max() < 1.0)
    if not contracting:
        issues.append("some ratio is >= 1 (not strictly contracting)")
    lower_ok = True
    if graph.lower_ratios is not None:
        if graph.n_edges and graph.lower_ratios.max() >= 1.0:
            lower_ok = False
            issues.append("some lower ratio is >= 1")
        if np.any(graph.lower_ratios > graph.ratios):
            lower_ok = False
            issues.append("some lower ratio exceeds its upper ratio")
    return ValidationReport(sc, min_deg, contracting, lower_ok, tuple(issues))


def is_contracting(graph, which="upper"):
    """True iff every cycle has ratio product < 1.

    Equivalent to: the maximum cycle mean of log r_e is < 0, found per SCC
    with Karp's minimum-mean-cycle recursion on weights -log r_e.  Graphs
    whose ratios are all below 1 (or all at least 1) short-circuit.
    """
    r = graph.ratio_array(which)
    if r.size == 0:
        return True
    if r.max() < 1.0:
        return True
    sccs = strongly_connected_components(graph.n_vertices, graph.sources,
                                         graph.targets)
    if r.min() >= 1.0:
        # any cycle already has product >= 1; cycles exist iff some SCC
        # contains an edge
        for verts in sccs:
            inside = np.isin(graph.sources, verts) & np.isin(graph.targets, verts)
            if inside.any():
                return False
        return True

    w = -np.log(r)
    for verts in sccs:
        inside = np.isin(graph.sources, verts) & np.isin(graph.targets, verts)
        if not inside.any():
            continue
        m = verts.size
        local = -np.ones(graph.n_vertices, dtype=np.int64)
        local[verts] = np.arange(m)
        es = local[graph.sources[inside]]
        et = local[graph.targets[inside]]
        ew = w[inside]
        # Karp: D[k][v] = min weight of a walk with exactly k edges from the
        # root; needs the full table, hence O(m^2) memory (fine at test scale,
        # the short-circuits above cover large graphs)
        D = np.full((m + 1, m), np.inf)
        D[0, 0] = 0.0
        for k in range(1, m + 1):
            row = np.full(m, np.inf)
            cand = D[k - 1, es] + ew
            np.minimum.at(row, et, cand)
            D[k] = row
        finite = np.isfinite(D[m])
        if not finite.any():
            continue
        with np.errstate(invalid="ignore"):
            num = D[m][None, :] - D[:m, :]
            den = (m - np.arange(m))[:, None].astype(float)
            frac = num / den
        frac[~np.isfinite(frac)] = -np.inf
        mu = frac.max(axis=0)[finite].min()
        if mu <= 0.0:
            return False
    return True


@dataclass(frozen=True)
class Path:
    """Edge-id sequence with its endpoints; empty paths sit at their source."""

    edges: tuple[int, ...]
    source: int
    target: int

    @property
    def length(self):
        return len(self.edges)

    def __len__(self):
        return len(self.edges)

    @property
    def is_empty(self):
        return not self.edges


def make_path(graph, edge_ids, at=None):
    """Validated Path from edge ids; ``at`` names the vertex of an empty path."""
    ids = tuple(int(e) for e in edge_ids)
    if not ids:
        if at is None:
            raise ValidationError("empty path needs a home vertex")
        u = int(at)
        if not 0 <= u < graph.n_vertices:
            raise ValidationError(f"vertex {u} out of range")
        return Path((), u, u)
    for e in ids:
        if not 0 <= e < graph.n_edges:
            raise ValidationError(f"edge id {e} out of range")
    for a, b in zip(ids, ids[1:]):
        if graph.targets[a] != graph.sources[b]:
            raise ValidationError(
                f"edges {a} and {b} do not chain "
                f"({graph.targets[a]} != {graph.sources[b]})")
    if at is not None and int(at) != int(graph.sources[ids[0]]):
        raise ValidationError("home vertex disagrees with first edge")
    return Path(ids, int(graph.sources[ids[0]]), int(graph.targets[ids[-1]]))


def empty_path(graph, u):
    return make_path(graph, (), at=u)


def path_concat(graph, a, b):
    if a.target != b.source:
        raise ValidationError("paths do not chain")
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    return Path(a.edges + b.edges, a.source, b.target)


def path_ratio(graph, path, which="upper"):
    """Product of edge ratios along the path; 1 for an empty path."""
    r = graph.ratio_array(which)
    out = 1.0
    for e in path.edges:
        out *= r[e]
    return out


def enumerate_paths(graph, start, length):
    """All paths of exactly the given length from ``start``, lexicographic
    by edge id."""
    if length < 0:
        raise ValidationError("length must be >= 0")
    u = int(start)
    if not 0 <= u < graph.n_vertices:
        raise ValidationError(f"vertex {u} out of range")
    if length == 0:
        return [Path((), u, u)]
    out = []

    def walk(prefix, here, remaining):
        if remaining == 0:
            out.append(Path(tuple(prefix), u, here))
            return
        for e in graph.out_edges(here):
            prefix.append(int(e))
            walk(prefix, int(graph.targets[e]), remaining - 1)
            prefix.pop()

    walk([], u, length)
    return out


@dataclass(frozen=True)
class CrossCut:
    """Pairwise-incomparable finite paths meeting every infinite admissible
    string exactly once; grouped by source vertex."""

    delta: float
    paths: tuple[Path, ...]

    def from_vertex(self, u):
        return tuple(p for p in self.paths if p.source == u)

    def __len__(self):
        return len(self.paths)


def cross_cut_below(graph, delta, which="upper", max_paths=2_000_000):
    """The "first time less than delta" cross-cut.

    Expands every vertex's empty path depth-first (edge-id order) and stops a
    branch the first time its ratio drops below ``delta``, so the returned
    paths are exactly those with r(alpha) < delta <= r(parent of alpha).
    Requires a strictly contracting graph: with some r_e >= 1 the expansion
    need not terminate.
    """
    if not 0.0 < delta <= 1.0:
        raise ValidationError("delta must lie in (0, 1]")
    r = graph.ratio_array(which)
    if r.size == 0 or r.max() >= 1.0:
        raise ValidationError("cross-cut needs a strictly contracting graph")
    for u in range(graph.n_vertices):
        if graph.out_degree(u) == 0:
            raise ValidationError(f"vertex {u} has no outgoing edge")
    out = []
    for u in range(graph.n_vertices):
        # stack holds (edge-tuple, target, ratio); children pushed in reverse
        # id order so emission is lexicographic
        stack = [((), u, 1.0)]
        while stack:
            edges, here, ratio = stack.pop()
            if ratio < delta:
                out.append(Path(edges, u, here))
                if len(out) > max_paths:
                    raise ConvergenceError(
                        f"cross-cut exceeds {max_paths} paths; delta too small")
                continue
            for e in graph.out_edges(here)[::-1]:
                stack.append((edges + (int(e),), int(graph.targets[e]),
                              ratio * r[e]))
    return CrossCut(float(delta), tuple(out))


@dataclass(frozen=True)
class PerronData:
    """Perron eigendata of the ratio matrix at exponent s."""

    s: float
    radius: float
    eigenvector: np.ndarray  # positive, sums to 1
    residual: float
    iterations: int


def cylinder_measure(graph, path, s, perron, which="upper"):
    """Natural measure of the cylinder of strings starting with ``path``:
    r(alpha)^s * lambda_{target(alpha)}.

    Only meaningful when ``perron`` was computed at the graph dimension,
    i.e. spectral radius 1; enforced loosely here.
    """
    if abs(perron.radius - 1.0) > 1e-6:
        raise ValidationError(
            f"cylinder measure needs spectral radius 1, got {perron.radius}")
    return path_ratio(graph, path, which) ** s * float(perron.eigenvector[path.target])


def augment_with_cycles(graph, cycles, n):
    """Compose all length-n paths with a chosen cycle at their endpoint.

    ``cycles[v]`` must be a nonempty cycle at vertex v.  The result has one
    edge u -> v per length-n path alpha from u to v, with ratio
    r(alpha) * r(cycles[v]); it is the standard construction that forces the
    strong open set condition while only rescaling the spectral radius.
    """
    if int(n) < 1:
        raise ValidationError("n must be >= 1")
    if len(cycles) != graph.n_vertices:
        raise ValidationError("need one cycle per vertex")
    for v, z in enumerate(cycles):
        if z.is_empty or z.source != v or z.target != v:
            raise ValidationError(f"cycles[{v}] is not a nonempty cycle at {v}")
    both = graph.lower_ratios is not None
    rows = []
    for u in range(graph.n_vertices):
        for alpha in enumerate_paths(graph, u, int(n)):
            v = alpha.target
            r = path_ratio(graph, alpha) * path_ratio(graph, cycles[v])
            if both:
                rl = (path_ratio(graph, alpha, "lower")
                      * path_ratio(graph, cycles[v], "lower"))
                rows.append((u, v, r, rl))
            else:
                rows.append((u, v, r))
    return MWGraph.from_edges(graph.n_vertices, rows, labels=graph.labels)
