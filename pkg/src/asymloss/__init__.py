"""Optimal additive correction of predictions under asymmetric linear loss
with generalized Gaussian errors."""

from .errors import ConvergenceError, DomainError, InputError, InternalConsistencyError, OutOfFamilyError
from .fit import MomentSummary, fit_moments, summarize
from .gnd import GndParams, sample
from .loss import LossParams, expected_loss, expected_loss_derivative, variance_loss
from .montecarlo import LossStats, estimate_loss_stats
from .optimizer import Correction, loss_reduction, minimized_expected_loss, optimal_correction, variance_at_optimum

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "Correction",
    "DomainError",
    "GndParams",
    "InputError",
    "InternalConsistencyError",
    "LossParams",
    "LossStats",
    "MomentSummary",
    "OutOfFamilyError",
    "estimate_loss_stats",
    "expected_loss",
    "expected_loss_derivative",
    "fit_moments",
    "loss_reduction",
    "minimized_expected_loss",
    "optimal_correction",
    "sample",
    "summarize",
    "variance_at_optimum",
    "variance_loss",
]
