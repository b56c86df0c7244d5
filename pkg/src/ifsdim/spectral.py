"""Sparse nonnegative matrices, Perron roots, and the dimension solve.

The ratio matrix of a graph at exponent s has entries
M_uv(s) = sum of r_e^s over edges u -> v.  Its spectral radius is strictly
decreasing in s on contracting graphs, and the dimension of the system is
the unique s with radius exactly 1.  The solver below brackets that root by
bisection; the radius itself comes from power iteration on A + I (the shift
keeps periodic irreducible patterns from defeating the iteration).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .graphs import PerronData, is_strongly_connected, strongly_connected_components


class SparseNonnegMatrix:
    """Square nonnegative matrix in compressed-row form.

    ``indptr`` (length n+1), ``indices`` and ``data`` follow the usual CSR
    convention; duplicate columns within a row are not allowed (the builder
    sums them).  Rows may be empty.  Immutable after construction.
    """

    __slots__ = ("n", "indptr", "indices", "data")

    def __init__(self, n, indptr, indices, data):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        if self.indptr.shape != (self.n + 1,) or self.indptr[0] != 0 \
                or self.indptr[-1] != self.indices.size:
            raise ValidationError("malformed indptr")
        if np.any(np.diff(self.indptr) < 0):
            raise ValidationError("indptr must be nondecreasing")
        if self.indices.shape != self.data.shape:
            raise ValidationError("indices and data must align")
        if self.indices.size and (self.indices.min() < 0
                                  or self.indices.max() >= self.n):
            raise ValidationError("column index out of range")
        if np.any(self.data < 0) or not np.all(np.isfinite(self.data)):
            raise ValidationError("entries must be finite and nonnegative")
        for a in (self.indptr, self.indices, self.data):
            a.flags.writeable = False

    @classmethod
    def from_entries(cls, n, rows, cols, values):
        """Assemble from triplets; duplicate (row, col) pairs are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if rows.size == 0:
            return cls(n, np.zeros(int(n) + 1, dtype=np.int64), [], [])
        if rows.min() < 0 or rows.max() >= n:
            raise ValidationError("row index out of range")
        order = np.lexsort((cols, rows))
        r, c, v = rows[order], cols[order], values[order]
        keep = np.empty(r.size, dtype=bool)
        keep[0] = True
        keep[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        starts = np.flatnonzero(keep)
        sums = np.add.reduceat(v, starts)
        r, c = r[starts], c[starts]
        indptr = np.zeros(int(n) + 1, dtype=np.int64)
        np.add.at(indptr, r + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, c, sums)

    @property
    def nnz(self):
        return int(self.data.size)

    @property
    def has_empty_rows(self):
        return bool(np.any(np.diff(self.indptr) == 0))

    def matvec(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = np.zeros(self.n)
        if self.nnz == 0:
            return y
        prod = self.data * x[self.indices]
        row_len = np.diff(self.indptr)
        nonempty = row_len > 0
        # reduceat needs strictly valid start offsets, hence the empty-row mask
        y[nonempty] = np.add.reduceat(prod, self.indptr[:-1][nonempty])
        return y

    def to_dense(self):
        a = np.zeros((self.n, self.n))
        for i in range(self.n):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            np.add.at(a[i], self.indices[lo:hi], self.data[lo:hi])
        return a

    def __repr__(self):
        return f"SparseNonnegMatrix({self.n}x{self.n}, nnz={self.nnz})"


def build_matrix(graph, s, which="upper"):
    """Ratio matrix at exponent s: entry (u, v) = sum over edges u->v of r_e^s."""
    if s < 0:
        raise ValidationError("s must be >= 0")
    r = graph.ratio_array(which)
    return SparseNonnegMatrix.from_entries(
        graph.n_vertices, graph.sources, graph.targets, r ** float(s))


def is_irreducible(matrix):
    """True iff the nonzero pattern is strongly connected (1x1 counts)."""
    mask = matrix.data > 0
    rows = np.repeat(np.arange(matrix.n), np.diff(matrix.indptr))[mask]
    cols = matrix.indices[mask]
    return len(strongly_connected_components(matrix.n, rows, cols)) == 1


@dataclass(frozen=True)
class SpectralResult:
    radius: float
    eigenvector: np.ndarray  # positive entries, sums to 1
    residual: float          # max-norm of A x - radius x
    iterations: int
    degenerate: bool = False


def spectral_radius(matrix, tol=1e-12, max_iter=100_000):
    """Perron root and eigenvector by power iteration on A + beta I.

    The diagonal shift makes irreducible patterns primitive, so the
    iteration converges even on periodic matrices; beta is the largest row
    sum, which puts the shift on the scale of the matrix itself (a fixed
    shift of 1 stalls when the radius is orders of magnitude below 1,
    because every eigenvalue of A + I then sits within ~radius of 1).
    Convergence requires both a stagnant Rayleigh quotient and a small
    residual.  The all-zero matrix short-circuits to radius 0 with a
    flagged (uniform) eigenvector.
    """
    if max_iter < 1:
        raise ValidationError("max_iter must be >= 1")
    n = matrix.n
    if matrix.nnz == 0 or not matrix.data.any():
        return SpectralResult(0.0, np.full(n, 1.0 / n), 0.0, 0, degenerate=True)
    beta = float(np.max(matrix.matvec(np.ones(n))))
    x = np.full(n, 1.0 / n)
    rq_prev = np.inf
    for it in range(1, max_iter + 1):
        ax = matrix.matvec(x)
        # Rayleigh quotient of A + beta I, shifted back
        rho = (x @ ax) / (x @ x)
        resid = float(np.max(np.abs(ax - rho * x)))
        if abs(rho + beta - rq_prev) <= tol * max(beta, rho + beta) \
                and resid <= tol * beta * float(np.max(np.abs(x))):
            return SpectralResult(float(rho), x, resid, it)
        rq_prev = rho + beta
        y = ax + beta * x
        x = y / y.sum()
    best = SpectralResult(float(rho), x, resid, max_iter)
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations "
        f"(radius ~ {rho}, residual {resid})", best=best)


def spectral_radius_at(graph, s, which="upper", tol=1e-12, max_iter=100_000):
    """Spectral radius of the ratio matrix at exponent s (strictly
    decreasing in s for fixed contracting graph)."""
    return spectral_radius(build_matrix(graph, s, which), tol, max_iter).radius


def perron_data(graph, s, which="upper", tol=1e-12, max_iter=100_000):
    """Perron radius and sum-normalized eigenvector of M(s), as PerronData."""
    res = spectral_radius(build_matrix(graph, s, which), tol, max_iter)
    return PerronData(float(s), res.radius, res.eigenvector, res.residual,
                      res.iterations)


@dataclass(frozen=True)
class RadiusSample:
    """One spectral evaluation made during a dimension solve."""

    s: float
    radius: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class DimensionResult:
    s: float                 # midpoint of the final bracket
    bracket: tuple[float, float]
    evaluations: int
    samples: tuple[RadiusSample, ...]


def solve_dimension(graph, which="upper", tol=1e-10, spectral_tol=1e-12,
                    max_iter=100_000):
    """The unique s with spectral radius of M(s) equal to 1.

    Monotone bracketing: starting from [0, 1], the upper end doubles until
    the radius drops below 1, then plain bisection runs until the bracket is
    narrower than ``tol``.  The graph must be strongly connected and
    strictly contracting (in the selected ratio system).
    """
    r = graph.ratio_array(which)
    if r.size == 0 or r.max() >= 1.0:
        raise ValidationError("dimension needs a strictly contracting graph")
    if not is_strongly_connected(graph):
        raise ValidationError("dimension needs a strongly connected graph")
    if not tol > 0.0:
        raise ValidationError("tol must be positive")
    samples = []

    def radius_at(s):
        res = spectral_radius(build_matrix(graph, s, which), spectral_tol,
                              max_iter)
        samples.append(RadiusSample(float(s), res.radius, res.iterations,
                                    res.residual))
        return res.radius

    if radius_at(0.0) < 1.0 - 1e-9:
        raise ValidationError(
            "spectral radius at s=0 is below 1 (vertex with out-degree 0?)")
    lo, hi = 0.0, 1.0
    while radius_at(hi) >= 1.0:
        lo = hi
        hi *= 2.0
        if hi > 2.0 ** 20:
            raise ConvergenceError("could not bracket the dimension")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket already at float spacing
            raise ConvergenceError(
                f"cannot narrow the bracket below {hi - lo} (tol = {tol})")
        if radius_at(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return DimensionResult(0.5 * (lo + hi), (lo, hi), len(samples),
                           tuple(samples))


def matrix_power_entry(graph, s, u, v, k, which="upper"):
    """Entry (u, v) of M(s)^k, by k sparse mat-vec products.

    Equals the sum of r(alpha)^s over length-k paths u -> v; k = 0 gives the
    identity matrix entry.
    """
    if k < 0:
        raise ValidationError("k must be >= 0")
    for w in (u, v):
        if not 0 <= int(w) < graph.n_vertices:
            raise ValidationError(f"vertex {w} out of range")
    m = build_matrix(graph, s, which)
    x = np.zeros(graph.n_vertices)
    x[int(v)] = 1.0
    for _ in range(int(k)):
        x = m.matvec(x)
    return float(x[int(u)])
