"""Maximum likelihood fitting, observed information, Wald intervals and AIC."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .censoring import CensoredSample
from .distribution import WLParams
from .errors import (
    BoundaryDriftError,
    DomainError,
    EvaluationError,
    QuadratureError,
    SingularInformationError,
)
from .likelihood import LogLikContext, make_context
from .models import ComparisonModel, Family, get_family
from .optimize import bfgs_maximize

PARAM_BOX = (1e-6, 1e6)


def _sig(x, digits=10):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


@dataclass
class FitResult:
    """Outcome of :func:`fit`.

    ``hessian`` is the numeric Hessian of the log-likelihood at the estimate
    in the original parameterization (negative definite at a proper maximum);
    ``std_errors`` come from the inverse of its negation.
    """

    model: str
    param_names: tuple[str, ...]
    estimates: np.ndarray
    std_errors: np.ndarray
    ci_95: np.ndarray
    loglik: float
    aic: float
    hessian: np.ndarray
    converged: bool
    iterations: int
    scheme: dict
    n: int
    d: int
    gradient: np.ndarray = field(default_factory=lambda: np.full(2, np.nan))
    message: str = ""

    @property
    def k(self) -> int:
        return len(self.param_names)

    @property
    def params(self):
        """:class:`WLParams` for Weighted Lindley fits, else a name-to-value dict."""
        if self.model == "wl":
            return WLParams(self.estimates[0], self.estimates[1])
        return dict(zip(self.param_names, map(float, self.estimates)))

    def comparison_model(self) -> ComparisonModel:
        return ComparisonModel(get_family(self.model), tuple(map(float, self.estimates)))

    def to_dict(self) -> dict:
        names = self.param_names
        return {
            "model": self.model,
            "estimates": {k: _sig(v) for k, v in zip(names, self.estimates)},
            "std_errors": {k: _sig(v) for k, v in zip(names, self.std_errors)},
            "ci_95": {k: [_sig(lo), _sig(hi)] for k, (lo, hi) in zip(names, self.ci_95)},
            "loglik": _sig(self.loglik),
            "aic": _sig(self.aic),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "scheme": self.scheme,
            "n": self.n,
            "d": self.d,
        }

    def to_json(self, **extra) -> str:
        payload = self.to_dict()
        payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def numeric_hessian(fun, x) -> np.ndarray:
    """Central-difference Hessian of a scalar function.

    Step per coordinate is ``max(1e-5 |x_i|, 1e-8)``; the mixed partials use
    the four-point stencil and are written to both off-diagonal slots.
    """
    x = np.asarray(x, dtype=float)
    k = x.size
    h = np.maximum(1e-5 * np.abs(x), 1e-8)
    f0 = fun(x)
    H = np.empty((k, k))
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        H[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / (h[i] * h[i])
        for j in range(i):
            ej = np.zeros(k)
            ej[j] = h[j]
            mixed = (fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)) / (
                4.0 * h[i] * h[j]
            )
            H[i, j] = H[j, i] = mixed
    return H


def observed_information(params, ctx, family="wl") -> np.ndarray:
    """Negative numeric Hessian of the log-likelihood at ``params``."""
    fam = get_family(family)
    if isinstance(params, WLParams):
        theta = params.as_array()
    else:
        theta = np.asarray(params, dtype=float)
    if not isinstance(ctx, LogLikContext):
        ctx = make_context(ctx)
    if np.any(theta <= 0):
        raise DomainError("parameters must be strictly positive")
    return -numeric_hessian(lambda th: fam.loglik_and_score(th, ctx, want_grad=False)[0], theta)


def standard_errors(information: np.ndarray) -> np.ndarray:
    """Square roots of the diagonal of the inverse information.

    Raises
    ------
    SingularInformationError
        If the matrix is singular or not positive definite.
    """
    info = np.asarray(information, dtype=float)
    if not np.all(np.isfinite(info)):
        raise SingularInformationError("information matrix has non-finite entries")
    try:
        np.linalg.cholesky(info)
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularInformationError(f"observed information is not invertible: {exc}") from exc
    diag = np.diag(cov)
    if np.any(diag <= 0):
        raise SingularInformationError("inverse information has a nonpositive diagonal")
    return np.sqrt(diag)


def z_value(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return NormalDist().inv_cdf(0.5 + 0.5 * level)


def wald_ci(fit: FitResult | None = None, level: float = 0.95, *, estimates=None, std_errors=None) -> np.ndarray:
    """Intervals ``estimate -/+ z * SE``, one row per parameter."""
    if fit is not None:
        estimates, std_errors = fit.estimates, fit.std_errors
    est = np.asarray(estimates, dtype=float)
    se = np.asarray(std_errors, dtype=float)
    z = z_value(level)
    return np.column_stack([est - z * se, est + z * se])


def _log_objective(family: Family, ctx: LogLikContext):
    def fun(y):
        theta = np.exp(y)
        ll, g = family.loglik_and_score(theta, ctx, want_grad=True)
        return ll, g * theta

    return fun


def fit(
    sample: CensoredSample | LogLikContext,
    model: str | Family = "wl",
    *,
    level: float = 0.95,
    gtol: float = 1e-6,
    max_iter: int = 500,
) -> FitResult:
    """Maximum likelihood fit of ``model`` to a censored sample.

    Optimization runs on log-parameters by BFGS from a moment-matched start,
    falling back to a 3x3 log-spaced grid of starts when the moment start is
    unavailable or fails.  Standard errors come from the numeric observed
    information in the original parameterization.

    Raises
    ------
    AllCensoredError
        When the sample has no failures.
    BoundaryDriftError
        When every start drifts outside ``[1e-6, 1e6]``.
    """
    family = get_family(model)
    ctx = sample if isinstance(sample, LogLikContext) else make_context(sample)
    if ctx.n < 2:
        raise DomainError("fitting needs at least two observations")

    lower, upper = math.log(PARAM_BOX[0]), math.log(PARAM_BOX[1])
    objective = _log_objective(family, ctx)

    first = family.moment_start(ctx)
    starts = [first] if first is not None else []
    tried_grid = False
    best = None
    iterations = 0
    drifted = 0
    attempts = 0
    messages = []
    while True:
        if not starts:
            if tried_grid:
                break
            tried_grid = True
            starts = list(family.grid_starts(ctx))
        start = starts.pop(0)
        attempts += 1
        try:
            res = bfgs_maximize(objective, np.log(start), gtol=gtol, max_iter=max_iter,
                                lower=lower, upper=upper)
        except BoundaryDriftError as exc:
            drifted += 1
            messages.append(str(exc))
            continue
        except (EvaluationError, QuadratureError) as exc:
            messages.append(f"start {start}: {exc}")
            continue
        iterations += res.iterations
        if best is None or (res.converged, res.fun) > (best.converged, best.fun):
            best = res
        if res.converged:
            break

    if best is None:
        if drifted:
            raise BoundaryDriftError(
                f"all {attempts} starts drifted outside {PARAM_BOX}: " + "; ".join(messages[-3:])
            )
        raise EvaluationError("no start produced a finite log-likelihood")

    theta = np.exp(best.x)
    k = theta.size
    loglik_max = float(best.fun)
    grad = best.grad / theta
    converged = bool(best.converged)
    message = best.message
    hess = np.full((k, k), np.nan)
    se = np.full(k, np.nan)
    try:
        hess = -observed_information(theta, ctx, family)
        se = standard_errors(-hess)
    except (SingularInformationError, EvaluationError, QuadratureError) as exc:
        message = f"{message}; {exc}"
    ci = wald_ci(estimates=theta, std_errors=se, level=level)
    return FitResult(
        model=family.name,
        param_names=family.param_names,
        estimates=theta,
        std_errors=se,
        ci_95=ci,
        loglik=loglik_max,
        aic=-2.0 * loglik_max + 2.0 * k,
        hessian=hess,
        converged=converged,
        iterations=iterations,
        scheme=ctx.scheme.describe(),
        n=ctx.n,
        d=ctx.d,
        gradient=grad,
        message=message,
    )


@dataclass
class AICRow:
    family: str
    aic: float
    loglik: float
    converged: bool
    fit: FitResult | None
    error: str = ""


def aic_table(sample: CensoredSample | LogLikContext, families=("wl", "weibull", "gamma")) -> list[AICRow]:
    """Fit every family and rank by AIC (ascending).

    Rows whose fit failed or did not converge are kept, after the ranked rows,
    with ``converged=False``.
    """
    ctx = sample if isinstance(sample, LogLikContext) else make_context(sample)
    ranked, failed = [], []
    for name in families:
        fam = get_family(name)
        try:
            res = fit(ctx, fam)
        except (BoundaryDriftError, EvaluationError, QuadratureError) as exc:
            failed.append(AICRow(fam.name, math.nan, math.nan, False, None, str(exc)))
            continue
        row = AICRow(fam.name, res.aic, res.loglik, res.converged, res, "" if res.converged else res.message)
        (ranked if res.converged else failed).append(row)
    ranked.sort(key=lambda r: r.aic)
    return ranked + failed


__all__ = [
    "FitResult",
    "AICRow",
    "fit",
    "numeric_hessian",
    "observed_information",
    "standard_errors",
    "wald_ci",
    "z_value",
    "aic_table",
    "PARAM_BOX",
]
