"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class WLSurvError(Exception):
    """Base class for every error raised by wlsurv."""


class DomainError(WLSurvError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class QuadratureError(WLSurvError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class ConvergenceError(WLSurvError, ArithmeticError):
    """An iterative solver did not reach its tolerance."""


class EvaluationError(WLSurvError, ArithmeticError):
    """A log-likelihood or score evaluated to a non-finite value."""


class AllCensoredError(WLSurvError, ValueError):
    """The sample has no failures, so no interior maximum likelihood estimate exists."""


class BoundaryDriftError(ConvergenceError):
    """Optimizer iterates left the admissible parameter box."""


class SingularInformationError(WLSurvError, ArithmeticError):
    """The observed information matrix is singular or not positive definite."""


class DatasetError(WLSurvError, ValueError):
    """Malformed or invalid dataset content.

    ``line`` is the 1-based line number of the offending row when known and
    ``field`` names the offending column.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class CalibrationError(WLSurvError, RuntimeError):
    """Censoring calibration failed or a simulation study was aborted."""
