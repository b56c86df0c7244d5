"""Command-line interface.

Subcommands: ``dim`` (solve a graph file), ``julia-bounds`` (the full
bracket pipeline with reports and figures), ``sample`` (inverse-iteration
cloud), ``boxdim`` (box-count slope of a cloud file), ``render`` (overlay
figure from region/cloud files).

Exit codes: 0 success, 2 parse/usage, 3 validation, 4 numeric
non-convergence, 5 geometry failure.  All numeric output is printed with 12
significant digits; brackets are additionally rounded outward to 3 decimals
for display.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .boxdim import estimate_dimension, geometric_scales, sample_julia
from .errors import (ConvergenceError, GeometryError, GraphFormatError,
                     ValidationError)
from .fileio import (read_cloud, read_graph, read_regions, write_box_estimate,
                     write_cloud, write_levels_tsv, write_regions,
                     write_report_json)
from .julia import QuadraticMap, bounds_pipeline
from .plotting import render_brackets, render_overlay
from .spectral import solve_dimension

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4
EXIT_GEOMETRY = 5

DEPTH_CAP_DEFAULT = 14

# independently published reference dimension (McMullen's eigenvalue
# algorithm) for the fully supported parameter, drawn as a guide line
_REFERENCE_DIM = {(-0.5, 0.0): 1.07336}


def _fmt(x):
    return f"{float(x):.12g}"


def _outward(lo, hi):
    return math.floor(lo * 1000.0) / 1000.0, math.ceil(hi * 1000.0) / 1000.0


def _bracket_display(lo, hi):
    flo, fhi = _outward(lo, hi)
    return f"{flo:.3f} < dim < {fhi:.3f}"


def _parse_c(text):
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}")


def _parse_bracket(text):
    parts = text.split(",")
    try:
        if len(parts) == 2:
            lo, hi = float(parts[0]), float(parts[1])
            if lo <= hi:
                return (lo, hi)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"cannot parse bracket {text!r}")


def cmd_dim(args):
    graph = read_graph(args.graph)
    systems = ["upper", "lower"] if args.which == "both" else [args.which]
    if args.which == "both" and graph.lower_ratios is None:
        print("graph has a single ratio system; solving it as 'upper'")
        systems = ["upper"]
    results = {}
    for which in systems:
        res = solve_dimension(graph, which, tol=args.tol)
        results[which] = res
        iters = sum(s.iterations for s in res.samples)
        print(f"{which}: s = {_fmt(res.s)}  bracket = "
              f"[{_fmt(res.bracket[0])}, {_fmt(res.bracket[1])}]  "
              f"evaluations = {res.evaluations}  "
              f"spectral_iterations = {iters}")
    if len(results) == 2:
        print("dimension bracket: "
              + _bracket_display(results["lower"].s, results["upper"].s))
    return EXIT_OK


def cmd_julia_bounds(args):
    if args.depth < 0:
        raise ValidationError("--depth must be >= 0")
    if args.depth > args.depth_cap:
        raise ValidationError(
            f"--depth {args.depth} exceeds the cap {args.depth_cap} "
            f"(raise --depth-cap if you really want this)")
    qmap = QuadraticMap(args.c)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def progress(lv):
        print(f"level {lv.level}: nodes = {lv.n_vertices}  "
              f"s2 = {_fmt(lv.s_lower)}  s1 = {_fmt(lv.s_upper)}  "
              f"width = {_fmt(lv.width)}  seconds = {lv.seconds:.2f}")
        for w in lv.warnings:
            print(f"  warning: {w}", file=sys.stderr)
        sys.stdout.flush()

    # region files only on shallow levels: they double per level and a
    # depth-10 dump would run to hundreds of MB
    kept = {}

    def keep(level, regions):
        if level <= args.regions_depth:
            kept[level] = regions

    report = bounds_pipeline(qmap, args.depth, tol=args.tol,
                             samples_per_side=args.samples, slack=args.slack,
                             bound_mode=args.mode, progress=progress,
                             region_hook=keep)

    write_levels_tsv(report, out / "levels.tsv")
    write_report_json(report, out / "report.json")
    for level, regs in kept.items():
        write_regions(regs, out / f"regions_level{level}.txt")
    if not args.no_figures and kept:
        deepest = kept[max(kept)]
        render_overlay(out / "regions.svg", regions=deepest,
                       escape_radius=qmap.escape_radius,
                       title=f"level {max(kept)} regions (c = {qmap.c})")
    if not args.no_figures and report.levels:
        ref = _REFERENCE_DIM.get((qmap.c.real, qmap.c.imag))
        render_brackets(report, out / "brackets.svg", reference=ref)

    if report.failure is not None:
        print(f"error at level {report.failure['level']}: "
              f"{report.failure['message']}", file=sys.stderr)
        return {"GeometryError": EXIT_GEOMETRY,
                "ValidationError": EXIT_VALIDATION}.get(
                    report.failure["error"], EXIT_NUMERIC)
    lo, hi = report.final_bracket
    print(f"final bracket: s2 = {_fmt(lo)}  s1 = {_fmt(hi)}")
    print(_bracket_display(lo, hi))
    print(f"report written to {out}")
    return EXIT_OK


def cmd_sample(args):
    qmap = QuadraticMap(args.c)
    cloud = sample_julia(qmap, args.n, burn_in=args.burn_in, seed=args.seed)
    write_cloud(cloud, args.out)
    print(f"sampled {cloud.n} points (seed = {cloud.seed}, burn_in = "
          f"{cloud.burn_in}, branch_resets = {cloud.branch_resets}) "
          f"-> {args.out}")
    return EXIT_OK


def cmd_boxdim(args):
    cloud = read_cloud(args.cloud)
    deltas = geometric_scales(args.dmin, args.dmax, args.scales)
    est = estimate_dimension(cloud, deltas)
    print("delta\tcount")
    for d, n in zip(est.deltas, est.counts):
        print(f"{_fmt(d)}\t{n}")
    print(f"slope = {_fmt(est.slope)}  rms_residual = "
          f"{_fmt(est.rms_residual)}  points = {cloud.n}")
    if args.bracket is not None:
        lo, hi = args.bracket
        inside = lo <= est.slope <= hi
        print(f"bracket check: slope {'inside' if inside else 'OUTSIDE'} "
              f"[{_fmt(lo)}, {_fmt(hi)}]")
    if args.out:
        write_box_estimate(est, args.out, bracket=args.bracket)
        print(f"estimate written to {args.out}")
    return EXIT_OK


def cmd_render(args):
    if args.regions is None and args.cloud is None:
        raise GraphFormatError("render needs --regions and/or --cloud")
    regions = read_regions(args.regions) if args.regions else []
    cloud = read_cloud(args.cloud) if args.cloud else None
    radius = None
    if regions:
        radius = max(float(abs(r.boundary).max()) for r in regions)
    render_overlay(args.out, regions=regions, cloud=cloud,
                   escape_radius=radius)
    print(f"figure written to {args.out}")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ifsdim",
        description="Dimension brackets for graph-directed IFS attractors "
                    "and quadratic Julia sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="solve the dimension of a ratio graph file")
    p.add_argument("--graph", required=True, help="graph file to solve")
    p.add_argument("--which", choices=("upper", "lower", "both"),
                   default="both")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="bisection bracket width (default 1e-10)")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("julia-bounds",
                       help="per-level dimension brackets for z^2 + c")
    p.add_argument("--c", type=_parse_c, default=complex(-0.5, 0.0),
                   metavar="RE[,IM]", help="map parameter (default -0.5)")
    p.add_argument("--depth", type=int, default=10, metavar="K",
                   help="deepest refinement level (default 10)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--samples", type=int, default=256,
                   help="boundary samples per region side (default 256)")
    p.add_argument("--slack", type=float, default=1e-6,
                   help="additive modulus slack (default 1e-6)")
    p.add_argument("--mode", choices=("parent", "image"), default="parent",
                   help="ratio bounds from containing region (parent) or "
                        "branch image (image)")
    p.add_argument("--depth-cap", type=int, default=DEPTH_CAP_DEFAULT,
                   help=f"hard depth cap (default {DEPTH_CAP_DEFAULT})")
    p.add_argument("--regions-depth", type=int, default=2,
                   help="write region boundary files up to this level "
                        "(default 2)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_julia_bounds)

    p = sub.add_parser("sample", help="sample a Julia set by inverse iteration")
    p.add_argument("--c", type=_parse_c, default=complex(-0.5, 0.0),
                   metavar="RE[,IM]")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=256)
    p.add_argument("--out", required=True, help="cloud file to write")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("boxdim", help="box-count slope of a cloud file")
    p.add_argument("--cloud", required=True)
    p.add_argument("--dmin", type=float, required=True)
    p.add_argument("--dmax", type=float, required=True)
    p.add_argument("--scales", type=int, required=True)
    p.add_argument("--bracket", type=_parse_bracket, default=None,
                   metavar="LO,HI",
                   help="optionally check the slope against a bracket")
    p.add_argument("--out", default=None, help="write the (delta, count) "
                   "table and summary here")
    p.set_defaults(func=cmd_boxdim)

    p = sub.add_parser("render", help="overlay figure from saved files")
    p.add_argument("--regions", default=None, help="region boundary file")
    p.add_argument("--cloud", default=None, help="point cloud file")
    p.add_argument("--out", required=True, help="figure file (.svg)")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        if getattr(args, "command", None) == "boxdim" and args.scales < 4:
            parser.error("--scales must be at least 4")
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    except (GraphFormatError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
