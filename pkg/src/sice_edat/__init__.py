"""Sparse inverse covariance estimation with transform-domain updates and
exponentially decaying adaptive hard thresholding (SICE-EDAT)."""
from .baseline import BaselineConfig, reference_solve, run_gista
from .estimator import (EstimationResult, EstimatorConfig, IterationRecord,
                        Status, objective_value, run_sice_edat, sice_edat_step)
from .linalg import NotPositiveDefinite
from .metrics import frob_error, support_metrics
from .synthetic import RngSpec, make_problem

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "EstimationResult",
    "EstimatorConfig",
    "IterationRecord",
    "NotPositiveDefinite",
    "RngSpec",
    "Status",
    "frob_error",
    "make_problem",
    "objective_value",
    "reference_solve",
    "run_gista",
    "run_sice_edat",
    "sice_edat_step",
    "support_metrics",
]
