"""Dimension brackets for quadratic Julia sets via Markov partition refinement.

The Julia set of z^2 + c (c = -1/2 is the fully supported case) is covered by
four three-sided quadrant regions bounded by the escape circle, an inner
parallelogram with vertices on the axes, and axis segments.  Each region is
a union of inverse-branch images of regions, giving a 4-vertex, 8-edge
transition graph.  Because the inverse branches are conformal with
|f'(w)| = 1/(2|f(w)|), the min/max modulus over a region bounds the branch's
Lipschitz constants (upper ratio 1/(2m), lower ratio 1/(2M)), and solving
the ratio matrices of the refined systems brackets the dimension from both
sides.  Refining the partition (pushing regions through branches, level k
has 2^(k+2) vertices) tightens the bracket.

Regions are represented by boundary samples; conformal maps carry boundaries
to boundaries, and modulus extremes over a compact set that excludes the
origin are attained on the boundary, so sampled boundaries plus a small
additive slack give honest bounds at desk scale.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, GeometryError, ValidationError
from .graphs import MWGraph
from .spectral import DimensionResult, solve_dimension

QUADRANT_LABELS = ("A", "B", "C", "D")
# quadrant sign conventions: A = (+,+), B = (-,+), C = (-,-), D = (+,-)
_QUADRANT_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))

# base transition structure: region u is made up of branch images of the
# regions it has edges to (A of A and B; B of C and D; C of A and B; D of C
# and D).  The sign is the square-root branch landing in region u: principal
# for the right half (A, D), negated for the left (B, C).
BASE_EDGES = ((0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 1), (3, 2), (3, 3))
BRANCH_SIGNS = (1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0)


def _branch_push(e, w, c):
    """Inverse branch of base edge e applied to w: +-sqrt(w - c).

    The sign is applied by unary negation, never by multiplying with -1.0:
    complex multiplication turns a -0.0 imaginary part into +0.0 and sends
    later pushes of axis points to the wrong side of the branch cut.
    """
    root = np.sqrt(w - c)
    return -root if BRANCH_SIGNS[e] < 0.0 else root


@dataclass(frozen=True)
class QuadraticMap:
    """z -> z^2 + c with its escape radius."""

    c: complex

    @property
    def escape_radius(self):
        """Radius R with |z| > R escaping to infinity: the positive root of
        R^2 - R - |c| = 0."""
        return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * abs(self.c)))

    def apply(self, z):
        return z * z + self.c

    def inverse_branches(self, w):
        """Both square roots of w - c: (principal, negated).

        Works elementwise on arrays.  The critical value w = c is a branch
        point and rejected.
        """
        w = np.asarray(w, dtype=complex) if not np.isscalar(w) else w
        shifted = w - self.c
        if np.any(np.asarray(shifted) == 0):
            raise GeometryError(f"w = {self.c} is the branch point of the inverse")
        plus = np.sqrt(shifted) if isinstance(shifted, np.ndarray) else complex(np.sqrt(shifted))
        return plus, -plus


@dataclass(frozen=True)
class Region:
    """One piece of the partition: a closed boundary polyline of samples.

    ``path`` is the base-edge sequence that produced the region (empty at
    level 0) and ``home`` the quadrant it lives in.
    """

    path: tuple[int, ...]
    home: int
    boundary: np.ndarray

    def __post_init__(self):
        b = np.ascontiguousarray(self.boundary, dtype=complex)
        if b.ndim != 1 or b.size < 1:
            raise ValidationError("boundary must be a nonempty 1-d complex array")
        if not np.all(np.isfinite(b)):
            raise ValidationError("boundary samples must be finite")
        if np.min(np.abs(b)) <= 0.0:
            raise GeometryError("region touches the origin; inverse branches "
                                "are not single-valued there")
        b.flags.writeable = False
        object.__setattr__(self, "boundary", b)

    @property
    def label(self):
        tag = QUADRANT_LABELS[self.home]
        if not self.path:
            return tag
        return tag + ":" + "-".join(str(e) for e in self.path)

    @property
    def terminal(self):
        """Base vertex whose region this one is a branch image of."""
        return BASE_EDGES[self.path[-1]][1] if self.path else self.home


@dataclass(frozen=True)
class ModulusBounds:
    """Slack-adjusted min/max modulus over a region."""

    m: float
    M: float
    slack: float


def modulus_bounds(region, slack=0.0):
    a = np.abs(region.boundary)
    m = float(a.min()) - slack
    M = float(a.max()) + slack
    if m <= 0.0:
        raise GeometryError(
            f"region {region.label}: modulus lower bound {m} <= 0 after slack")
    return ModulusBounds(m, M, float(slack))


def branch_ratio_bounds(region, slack=0.0):
    """Lipschitz bounds (r_lower, r_upper) for an inverse branch whose image
    lies in ``region``: 1/(2M) and 1/(2m).

    The branch derivative has modulus 1/(2|z|) at image point z, so the
    extremes of |z| over the region bound the ratio from both sides.
    r_upper must stay below 1 (the region must keep away from the origin by
    more than 1/2) or the refined system would not contract.
    """
    mb = modulus_bounds(region, slack)
    r_upper = 0.5 / mb.m
    r_lower = 0.5 / mb.M
    if r_upper >= 1.0:
        raise GeometryError(
            f"region {region.label}: m = {mb.m} <= 1/2 gives non-contracting "
            f"upper ratio {r_upper}")
    return r_lower, r_upper


def _quadrant_margin(z, quadrant, p, q, R):
    """Signed membership margin of points in the given quadrant region
    (min over the four constraints; >= 0 means inside)."""
    sx, sy = _QUADRANT_SIGNS[quadrant]
    x = sx * np.real(z)
    y = sy * np.imag(z)
    side = x / p + y / q - 1.0
    return np.minimum.reduce([x, y, R - np.abs(z), side])


def _first_quadrant_boundary(R, p, q, n):
    """Counterclockwise closed boundaries of regions A and B (C, D are the
    negations).  Segment endpoints are half-open so corners appear exactly
    once, and the foot of the perpendicular from the origin onto the
    parallelogram side is inserted so the minimal modulus is sampled
    exactly."""
    ts = np.arange(n) / n
    arc = R * np.exp(1j * (0.5 * math.pi) * ts)          # (R,0) -> (0,R)
    imag_seg = 1j * (R + ts * (q - R))                   # (0,R) -> (0,q)
    t_foot_a = q * q / (p * p + q * q)
    ts_a = np.unique(np.append(ts, t_foot_a))
    side_a = p * ts_a + 1j * (q * (1.0 - ts_a))          # (0,q) -> (p,0)
    bnd_a = np.concatenate([arc, imag_seg, side_a])

    arc_b = 1j * arc                                     # (0,R) -> (-R,0)
    t_foot_b = p * p / (p * p + q * q)
    ts_b = np.unique(np.append(ts, t_foot_b))
    side_b = -p * (1.0 - ts_b) + 1j * (q * ts_b)         # (-R,0) -> (0,q)
    imag_b = 1j * (q + ts * (R - q))                     # (0,q) -> (0,R)
    bnd_b = np.concatenate([arc_b, side_b, imag_b])
    return bnd_a, bnd_b


def _parallelogram_candidates(c, R):
    """Imaginary-axis intercepts q to try, best first.

    sqrt(|c|) makes the parallelogram's imaginary vertices the preimages of
    the critical point and is exact (tangent containment) for the fully
    supported real cases; a descending coarse grid backs it up for other
    parameters.
    """
    out = []
    exact = math.sqrt(abs(c))
    if exact > 0.0:
        out.append(exact)
    out.extend(R * j / 33.0 for j in range(32, 0, -1))
    return out


def build_initial_regions(qmap, samples_per_side=256, tol=1e-9):
    """The four quadrant regions, the base transition graph, and (p, q).

    Verifies the Markov property numerically: every inverse-branch image of
    every region must land inside its assigned region (within ``tol``; the
    optimal parallelogram touches with exact tangency).  Raises
    GeometryError naming the worst violation otherwise.  The returned graph
    carries the containing-region ratio bounds with zero slack.
    """
    ns = int(samples_per_side)
    if ns < 8:
        raise ValidationError("samples_per_side must be >= 8")
    c = qmap.c
    R = qmap.escape_radius
    p = R
    failure = None
    for q in _parallelogram_candidates(c, R):
        if not q < R:
            continue
        bnd_a, bnd_b = _first_quadrant_boundary(R, p, q, ns)
        bounds = (bnd_a, bnd_b, -bnd_a, -bnd_b)
        worst = np.inf
        worst_at = None
        for e, (u, v) in enumerate(BASE_EDGES):
            z = _branch_push(e, bounds[v], c)
            margins = _quadrant_margin(z, u, p, q, R)
            i = int(np.argmin(margins))
            if margins[i] < worst:
                worst = float(margins[i])
                worst_at = (u, v, complex(z[i]))
        if worst >= -tol:
            regions = tuple(
                Region(path=(), home=h, boundary=b) for h, b in enumerate(bounds))
            graph = _transition_graph(qmap, regions, slack=0.0,
                                      bound_mode="parent")
            return regions, graph, (p, q)
        failure = (q, worst, worst_at)
    q, worst, (u, v, z) = failure
    raise GeometryError(
        f"no parallelogram found for c = {c}: best candidate q = {q} leaves "
        f"the branch image of region {QUADRANT_LABELS[v]} outside region "
        f"{QUADRANT_LABELS[u]} by {-worst:.3e} (sample {z})")


def _transition_graph(qmap, regions, slack, bound_mode):
    """Level graph over the given regions (sorted by (home, path)).

    Vertices are the regions; region alpha has an edge to beta = (shifted
    alpha)+e' for each base edge e' leaving alpha's terminal vertex.  The
    edge's map is the first branch of alpha (or e' itself at level 0), so:

    - bound_mode "parent": ratio bounds from min/max modulus over the source
      region, which contains every outgoing image;
    - bound_mode "image": bounds over the actual image of the target region
      under the edge's branch (tighter, one extra push per edge).
    """
    if bound_mode not in ("parent", "image"):
        raise ValidationError(f"unknown bound_mode {bound_mode!r}")
    index = {(r.home, r.path): i for i, r in enumerate(regions)}
    c = qmap.c
    src, tgt, upper, lower = [], [], [], []
    parent_bounds = None
    if bound_mode == "parent":
        parent_bounds = [branch_ratio_bounds(r, slack) for r in regions]
    for i, reg in enumerate(regions):
        for e in range(len(BASE_EDGES)):
            if BASE_EDGES[e][0] != reg.terminal:
                continue
            if reg.path:
                new_path = reg.path[1:] + (e,)
                beta_key = (BASE_EDGES[new_path[0]][0], new_path)
                branch = reg.path[0]
            else:
                beta_key = (BASE_EDGES[e][1], ())
                branch = e
            j = index[beta_key]
            src.append(i)
            tgt.append(j)
            if bound_mode == "parent":
                r_lo, r_up = parent_bounds[i]
            else:
                image = Region(path=(branch,) + regions[j].path,
                               home=BASE_EDGES[branch][0],
                               boundary=_branch_push(branch,
                                                     regions[j].boundary, c))
                r_lo, r_up = branch_ratio_bounds(image, slack)
            upper.append(r_up)
            lower.append(r_lo)
    labels = [r.label for r in regions]
    return MWGraph(len(regions), src, tgt, upper, lower_ratios=lower,
                   labels=labels)


@dataclass(frozen=True)
class RefinedIFS:
    """Level-k refinement: one region per length-k base path, plus the
    transition graph carrying upper and lower ratio bounds."""

    qmap: QuadraticMap
    level: int
    p: float
    q: float
    samples_per_side: int
    slack: float
    bound_mode: str
    regions: tuple[Region, ...]
    graph: MWGraph


def initial_system(qmap, samples_per_side=256, slack=1e-6,
                   bound_mode="parent", tol=1e-9):
    """Level-0 RefinedIFS over the four quadrant regions."""
    regions, _, (p, q) = build_initial_regions(qmap, samples_per_side, tol)
    graph = _transition_graph(qmap, regions, slack, bound_mode)
    return RefinedIFS(qmap, 0, p, q, int(samples_per_side), float(slack),
                      bound_mode, regions, graph)


def refine(ifs):
    """One refinement step: push every region through every branch landing
    on it, giving the level k+1 system (2x the regions)."""
    c = ifs.qmap.c
    R_tol = ifs.qmap.escape_radius + 1e-9
    new_regions = []
    for e, (u, v) in enumerate(BASE_EDGES):
        for reg in ifs.regions:
            if reg.home != v:
                continue
            z = _branch_push(e, reg.boundary, c)
            pushed = Region(path=(e,) + reg.path, home=u, boundary=z)
            if np.max(np.abs(z)) > R_tol:
                raise GeometryError(
                    f"region {pushed.label}: pushed sample escapes the "
                    f"radius-{ifs.qmap.escape_radius} disk")
            new_regions.append(pushed)
    new_regions.sort(key=lambda r: (r.home, r.path))
    regions = tuple(new_regions)
    graph = _transition_graph(ifs.qmap, regions, ifs.slack, ifs.bound_mode)
    return RefinedIFS(ifs.qmap, ifs.level + 1, ifs.p, ifs.q,
                      ifs.samples_per_side, ifs.slack, ifs.bound_mode,
                      regions, graph)


@dataclass(frozen=True)
class LevelResult:
    level: int
    n_vertices: int
    n_edges: int
    lower: DimensionResult
    upper: DimensionResult
    seconds: float
    warnings: tuple[str, ...] = ()

    @property
    def s_lower(self):
        return self.lower.s

    @property
    def s_upper(self):
        return self.upper.s

    @property
    def width(self):
        return self.upper.s - self.lower.s


@dataclass
class BoundsReport:
    """Per-level dimension brackets for one map, plus the geometry used."""

    c: complex
    p: float
    q: float
    samples_per_side: int
    slack: float
    bound_mode: str
    tol: float
    levels: list[LevelResult] = field(default_factory=list)
    failure: dict | None = None

    @property
    def final_bracket(self):
        if not self.levels:
            return None
        last = self.levels[-1]
        return (last.s_lower, last.s_upper)


def bounds_pipeline(qmap, max_level, *, tol=1e-10, spectral_tol=1e-12,
                    max_iter=100_000, samples_per_side=256, slack=1e-6,
                    bound_mode="parent", containment_tol=1e-9, progress=None,
                    region_hook=None):
    """Brackets per refinement level 0..max_level.

    Each level solves the lower and upper ratio systems of the refined
    transition graph.  A failing level stops the run; the partial report
    comes back with ``failure`` set instead of raising, so callers get every
    completed level.  ``region_hook(level, regions)``, if given, sees each
    level's regions before they are replaced by the next refinement.
    """
    if max_level < 0:
        raise ValidationError("max_level must be >= 0")
    report = BoundsReport(qmap.c, float("nan"), float("nan"),
                          int(samples_per_side), float(slack), bound_mode,
                          float(tol))
    ifs = None
    for level in range(max_level + 1):
        t0 = time.perf_counter()
        try:
            if ifs is None:
                ifs = initial_system(qmap, samples_per_side, slack,
                                     bound_mode, containment_tol)
                report.p, report.q = ifs.p, ifs.q
            else:
                ifs = refine(ifs)
            if region_hook is not None:
                region_hook(level, ifs.regions)
            lower = solve_dimension(ifs.graph, "lower", tol=tol,
                                    spectral_tol=spectral_tol,
                                    max_iter=max_iter)
            upper = solve_dimension(ifs.graph, "upper", tol=tol,
                                    spectral_tol=spectral_tol,
                                    max_iter=max_iter)
        except (GeometryError, ValidationError, ConvergenceError) as exc:
            report.failure = {"level": level, "error": type(exc).__name__,
                              "message": str(exc)}
            return report
        warnings = []
        if upper.s < lower.s:
            warnings.append(f"level {level}: bracket inverted "
                            f"({lower.s} > {upper.s})")
        if report.levels:
            prev = report.levels[-1]
            if (upper.s - lower.s) > prev.width + 1e-12:
                warnings.append(f"level {level}: bracket wider than level "
                                f"{prev.level}")
            if lower.s < prev.s_lower - 1e-12 or upper.s > prev.s_upper + 1e-12:
                warnings.append(f"level {level}: bracket not nested in level "
                                f"{prev.level}")
        result = LevelResult(level, ifs.graph.n_vertices, ifs.graph.n_edges,
                             lower, upper, time.perf_counter() - t0,
                             tuple(warnings))
        report.levels.append(result)
        if progress is not None:
            progress(result)
    return report
