"""Weighted Lindley lifetime model: censored-data likelihood, estimation,
simulation studies and nonparametric diagnostics."""
from __future__ import annotations

__version__ = "0.1.0"

from ._jit import NUMBA_ENABLED
from .censoring import (
    CensoredSample,
    Complete,
    Random,
    TypeI,
    TypeII,
    apply_random,
    apply_type1,
    apply_type2,
    complete,
    load_bundled,
    load_dataset,
    parse_dataset,
    serialize,
)
from .distribution import WLParams, cdf, hazard, log_pdf, log_survival, moments, pdf, quantile, sample, survival
from .errors import (
    AllCensoredError,
    BoundaryDriftError,
    CalibrationError,
    ConvergenceError,
    DatasetError,
    DomainError,
    EvaluationError,
    QuadratureError,
    SingularInformationError,
    WLSurvError,
)
from .estimation import FitResult, aic_table, fit, observed_information, standard_errors, wald_ci
from .likelihood import loglik, loglik_complete, make_context, score
from .montecarlo import SimulationReport, StudyConfig, calibrate_random, calibrate_type1, run_study
from .nonparam import StepFunction, kaplan_meier, shape_hint, ttt_curve
from .special import QuadratureConfig, digamma, log_gamma, psi_integral, upper_inc_gamma

__all__ = [
    "__version__",
    "NUMBA_ENABLED",
    "CensoredSample", "Complete", "Random", "TypeI", "TypeII",
    "apply_random", "apply_type1", "apply_type2", "complete",
    "load_bundled", "load_dataset", "parse_dataset", "serialize",
    "WLParams", "cdf", "hazard", "log_pdf", "log_survival", "moments", "pdf", "quantile", "sample", "survival",
    "AllCensoredError", "BoundaryDriftError", "CalibrationError", "ConvergenceError", "DatasetError",
    "DomainError", "EvaluationError", "QuadratureError", "SingularInformationError", "WLSurvError",
    "FitResult", "aic_table", "fit", "observed_information", "standard_errors", "wald_ci",
    "loglik", "loglik_complete", "make_context", "score",
    "SimulationReport", "StudyConfig", "calibrate_random", "calibrate_type1", "run_study",
    "StepFunction", "kaplan_meier", "shape_hint", "ttt_curve",
    "QuadratureConfig", "digamma", "log_gamma", "psi_integral", "upper_inc_gamma",
]
