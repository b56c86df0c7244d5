"""Static figure emission (Agg backend): region overlays and bracket charts.

Every artist of interest carries a ``gid`` so emitted SVG groups can be
located by tools; the data-to-pixel affine transform is recorded in the
file metadata so plotted coordinates can be mapped back.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

_CLOUD_RENDER_CAP = 50_000


def _affine_description(ax):
    fig = ax.figure
    fig.canvas.draw()
    m = ax.transData.frozen().get_matrix()
    return ("data-to-pixel affine (matplotlib display coords, origin "
            "bottom-left): x_px = {:.6g}*x + {:.6g}; y_px = {:.6g}*y + {:.6g}"
            .format(m[0, 0], m[0, 2], m[1, 1], m[1, 2]))


def _save(fig, ax, out_path):
    meta = None
    if str(out_path).lower().endswith(".svg"):
        meta = {"Description": _affine_description(ax)}
    fig.savefig(out_path, metadata=meta)
    plt.close(fig)


def render_overlay(out_path, regions=(), cloud=None, escape_radius=None,
                   title=None):
    """Region boundaries as closed polylines over an optional point cloud.

    Clouds beyond 50k points are subsampled deterministically (seed 0) for
    rendering only.
    """
    fig, ax = plt.subplots(figsize=(6.4, 6.4), dpi=150)
    ax.set_aspect("equal")
    if cloud is not None:
        pts = cloud.points if hasattr(cloud, "points") else np.asarray(cloud)
        if pts.size > _CLOUD_RENDER_CAP:
            keep = np.random.default_rng(0).choice(pts.size,
                                                   _CLOUD_RENDER_CAP,
                                                   replace=False)
            pts = pts[np.sort(keep)]
        ax.plot(pts.real, pts.imag, ".", ms=0.5, color="#444444", alpha=0.5,
                gid="cloud")
    for reg in regions:
        b = reg.boundary
        xs = np.append(b.real, b.real[0])
        ys = np.append(b.imag, b.imag[0])
        ax.plot(xs, ys, lw=0.8, gid=f"region-{reg.label}")
    if escape_radius is not None:
        th = np.linspace(0.0, 2.0 * np.pi, 512)
        ax.plot(escape_radius * np.cos(th), escape_radius * np.sin(th),
                "--", lw=0.8, color="black", gid="escape-circle")
    ax.axhline(0.0, lw=0.3, color="gray")
    ax.axvline(0.0, lw=0.3, color="gray")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    if title:
        ax.set_title(title)
    _save(fig, ax, out_path)


def render_brackets(report, out_path, reference=None):
    """Lower/upper dimension bounds per refinement level, shaded between."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=150)
    levels = [lv.level for lv in report.levels]
    lo = [lv.s_lower for lv in report.levels]
    hi = [lv.s_upper for lv in report.levels]
    ax.fill_between(levels, lo, hi, alpha=0.2, color="tab:blue",
                    gid="bracket-band")
    ax.plot(levels, lo, "o-", ms=3, color="tab:blue", gid="bracket-lower",
            label="lower bound s2")
    ax.plot(levels, hi, "s-", ms=3, color="tab:red", gid="bracket-upper",
            label="upper bound s1")
    if reference is not None:
        ax.axhline(reference, ls="--", lw=0.8, color="black",
                   gid="reference",
                   label=f"reference {reference:g}")
    ax.set_xlabel("refinement level")
    ax.set_ylabel("dimension bound")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"dimension bracket per level (c = {report.c})")
    _save(fig, ax, out_path)
