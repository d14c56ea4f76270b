"""Flat norm with scale for discretized currents on cubical grids.

Two routes to the same numbers: binary L1TV by minimum cut for boundaries of
pixel sets, and a linear program over chains for everything else, plus the
dual (cochain) formulation.
"""

from .chainlp import LpConfig, alternate_optimum, flat_norm, flat_norm_lp, scaling_check
from .complex import (BinarySet, Chain, CubicalComplex, FormCochain, MassWeights, boundary,
                      boundary_of_set, build_complex, coboundary, dilate_pushforward, mass)
from .dualform import complementary_slackness_report, dual_flat_norm, extract_X
from .mincut import Decomposition, MincutConfig, l1tv_denoise, perimeter, vanishing_threshold
from .shapes import SweepSignature, distance_matrix, lambda_sweep, shape_distance

__version__ = "0.1.0"

__all__ = [
    "BinarySet", "Chain", "CubicalComplex", "Decomposition", "FormCochain", "LpConfig", "MassWeights",
    "MincutConfig", "SweepSignature", "alternate_optimum", "boundary", "boundary_of_set", "build_complex",
    "coboundary", "complementary_slackness_report", "dilate_pushforward", "distance_matrix",
    "dual_flat_norm", "extract_X", "flat_norm", "flat_norm_lp", "l1tv_denoise", "lambda_sweep", "mass",
    "perimeter", "scaling_check", "shape_distance", "vanishing_threshold",
]
