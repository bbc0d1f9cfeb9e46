"""Constrained Gaussian processes on finite grids.

Closed-form density, normalizing constant, MGF and mean under linear
inequality constraints ``A g + b >= 0``, conjugate regression and probit
classification updates, samplers, calibration diagnostics and a shifted-ball
check for the prior.
"""

from . import cgp, constraints, diagnostics, inference, kernels, mvn, theory
from .cgp import CgpDistribution, build
from .constraints import (LinearConstraintSet, bounds_constraint, convex_constraint,
                          monotone_constraint, stack, violation)
from .errors import (CgpError, InfeasibleConstraintsError, NumericalError, PDRepairError,
                     SamplerBudgetError, ValidationError)
from .kernels import KernelSpec, cross_gram, gram_matrix, kernel_eval
from .mvn import CdfResult, QmcOptions, mvn_cdf

__version__ = "0.1.0"

__all__ = [
    "CdfResult", "CgpDistribution", "CgpError", "InfeasibleConstraintsError", "KernelSpec",
    "LinearConstraintSet", "NumericalError", "PDRepairError", "QmcOptions", "SamplerBudgetError",
    "ValidationError", "bounds_constraint", "build", "cgp", "constraints", "convex_constraint",
    "cross_gram", "diagnostics", "gram_matrix", "inference", "kernel_eval", "kernels",
    "monotone_constraint", "mvn", "mvn_cdf", "stack", "theory", "violation",
]
