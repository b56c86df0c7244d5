"""Box-counting dimension estimates from sampled point clouds.

The empirical cross-check for the bracket pipeline: sample the Julia set by
inverse iteration (a random backward orbit equidistributes over the set),
count occupied grid boxes over a geometric range of scales, and fit the
log-log slope.  Grid boxes of side delta/sqrt(2) have diameter <= delta, a
constant-factor proxy for diameter-delta covers that leaves the slope
unchanged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class PointCloud:
    """Complex sample points plus the generator settings that made them."""

    points: np.ndarray
    seed: int | None = None
    burn_in: int = 0
    branch_resets: int = 0

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=complex)
        if pts.ndim != 1:
            raise ValidationError("points must be a 1-d complex array")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return int(self.points.size)


def sample_julia(qmap, n_points, burn_in=256, seed=0):
    """Random backward orbit of the quadratic map.

    Starts on the escape circle and applies a uniformly random inverse
    branch each step; the first ``burn_in`` iterates are discarded.  The
    escape disk is invariant under both branches (|w| <= R gives
    |w - c| <= R + |c| = R^2), so every emitted point satisfies |z| <= R up
    to rounding.  Hitting the branch point w = c restarts the orbit from the
    circle; occurrences are counted in the result.
    """
    if n_points < 1:
        raise ValidationError("n_points must be >= 1")
    if burn_in < 0:
        raise ValidationError("burn_in must be >= 0")
    rng = np.random.default_rng(seed)
    total = int(n_points) + int(burn_in)
    signs = (rng.integers(0, 2, size=total) * 2 - 1).astype(float)
    c = complex(qmap.c)
    start = complex(qmap.escape_radius, 0.0)
    z = start
    out = np.empty(int(n_points), dtype=complex)
    resets = 0
    for i in range(total):
        w = z - c
        if w == 0:
            resets += 1
            z = start
            w = z - c
        z = signs[i] * cmath.sqrt(w)
        if i >= burn_in:
            out[i - burn_in] = z
    cloud = PointCloud(out, seed=int(seed), burn_in=int(burn_in),
                       branch_resets=resets)
    r_max = float(np.max(np.abs(cloud.points)))
    if r_max > qmap.escape_radius + 1e-6:
        raise ValidationError(
            f"sampled point at |z| = {r_max} escapes the invariant disk")
    return cloud


def _point_array(points):
    pts = points.points if isinstance(points, PointCloud) else points
    return np.ascontiguousarray(pts, dtype=complex)


def box_count(points, delta):
    """Occupied cells of the origin-anchored grid with side delta/sqrt(2)."""
    if delta <= 0:
        raise ValidationError("delta must be positive")
    pts = _point_array(points)
    if pts.size == 0:
        return 0
    side = float(delta) / math.sqrt(2.0)
    ix = np.floor(pts.real / side)
    iy = np.floor(pts.imag / side)
    if max(np.max(np.abs(ix)), np.max(np.abs(iy))) >= 2 ** 31:
        raise ValidationError("delta too small for the cloud's extent")
    keys = ix.astype(np.int64) * (2 ** 32) + iy.astype(np.int64)
    return int(np.unique(keys).size)


@dataclass(frozen=True)
class BoxCountEstimate:
    """Log-log fit of occupied-box counts against scale."""

    deltas: tuple[float, ...]   # descending
    counts: tuple[int, ...]
    slope: float
    intercept: float
    rms_residual: float


def geometric_scales(d_min, d_max, count):
    """Geometric sequence of ``count`` scales from d_max down to d_min."""
    if not 0 < d_min < d_max:
        raise ValidationError("need 0 < d_min < d_max")
    if count < 2:
        raise ValidationError("need at least 2 scales")
    return np.geomspace(float(d_max), float(d_min), int(count))


def estimate_dimension(points, deltas):
    """Least-squares slope of log N against log(1/delta) over the range.

    Needs at least 4 distinct positive scales; the rms residual of the fit
    is reported as a quality flag (large residual means the range never
    entered a scaling regime).
    """
    d = np.sort(np.unique(np.asarray(deltas, dtype=float)))[::-1]
    if d.size < 4:
        raise ValidationError("need at least 4 distinct scales")
    if d[-1] <= 0:
        raise ValidationError("scales must be positive")
    pts = _point_array(points)
    counts = np.array([box_count(pts, x) for x in d], dtype=float)
    if np.any(counts == 0):
        raise ValidationError("empty cloud has no box-count slope")
    x = -np.log(d)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    rms = float(np.sqrt(np.mean((y - fit) ** 2)))
    return BoxCountEstimate(tuple(float(v) for v in d),
                            tuple(int(v) for v in counts),
                            float(slope), float(intercept), rms)
