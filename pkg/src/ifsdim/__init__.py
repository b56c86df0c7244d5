"""Rigorous dimension brackets for graph-directed self-similar sets.

The package has two halves.  The graph half (:mod:`ifsdim.graphs`,
:mod:`ifsdim.spectral`) solves the spectral-radius equation for a directed
multigraph carrying contraction ratios, and provides cross-cuts, cylinder
measures, and cycle augmentation on top of the Perron data.  The geometric
half (:mod:`ifsdim.julia`, :mod:`ifsdim.boxdim`) applies it to quadratic
Julia sets: quadrant regions in a parallelogram trap, per-level ratio
bounds from inverse-branch moduli, and an independent box-counting check
on a sampled cloud.
"""

from .boxdim import (BoxCountEstimate, PointCloud, box_count,
                     estimate_dimension, geometric_scales, sample_julia)
from .errors import (ConvergenceError, GeometryError, GraphFormatError,
                     ValidationError)
from .graphs import (CrossCut, MWGraph, Path, augment_with_cycles,
                     cross_cut_below, cylinder_measure, empty_path,
                     enumerate_paths, make_path, path_concat, path_ratio,
                     validate)
from .julia import (BoundsReport, LevelResult, QuadraticMap, RefinedIFS,
                    Region, bounds_pipeline, build_initial_regions,
                    initial_system, refine)
from .spectral import (DimensionResult, PerronData, SparseNonnegMatrix,
                       SpectralResult, build_matrix, matrix_power_entry,
                       perron_data, solve_dimension, spectral_radius,
                       spectral_radius_at)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport", "BoxCountEstimate", "ConvergenceError", "CrossCut",
    "DimensionResult", "GeometryError", "GraphFormatError", "LevelResult",
    "MWGraph", "Path", "PerronData", "PointCloud", "QuadraticMap",
    "RefinedIFS", "Region", "SparseNonnegMatrix", "SpectralResult",
    "ValidationError", "augment_with_cycles", "bounds_pipeline", "box_count",
    "build_initial_regions", "build_matrix", "cross_cut_below",
    "cylinder_measure", "empty_path", "enumerate_paths",
    "estimate_dimension", "geometric_scales", "initial_system", "make_path",
    "matrix_power_entry", "path_concat", "path_ratio", "perron_data",
    "refine", "sample_julia", "solve_dimension", "spectral_radius",
    "spectral_radius_at", "validate",
]
