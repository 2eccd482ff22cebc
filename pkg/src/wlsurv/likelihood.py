"""Weighted Lindley log-likelihood and analytic score under censoring.

Every scheme shares one form.  With ``d`` failures among ``n`` units and
censored times ``c_j`` (multiplicity ``m_j``)::

    l = sum_f log(1+t) + (phi-1) sum_f log t - lambda sum_f t
        + d (phi+1) log lambda - n log(lambda+phi) - n log Gamma(phi)
        + sum_j m_j log A(c_j),
    A(c) = (lambda+phi) Gamma(phi, lambda c) + (lambda c)**phi exp(-lambda c).

Type I has a single censoring time ``t_c`` and type II a single ``t_(r)``;
random censoring has one per censored unit.  The parameter-free type II
factor ``n!/(n-r)!`` is left out.  Writing ``x = lambda c``,
``G = Gamma(phi, x)`` and ``q = x**phi exp(-x) / G``, the censored
contributions to the score are::

    d/dlambda log A = (1 - (c+1) q) / (lambda + phi + q)
    d/dphi    log A = (1 + (lambda+phi) Psi(phi, x)/G + q log x) / (lambda + phi + q)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import jit
from .censoring import CensoredSample, Complete, TypeI, TypeII, complete
from .distribution import WLParams, _as_params
from .errors import AllCensoredError, EvaluationError, QuadratureError
from .special import DEFAULT_QUADRATURE, QuadratureConfig, _digamma, _log_upper_gamma, _psi_scaled


@dataclass(frozen=True)
class LogLikContext:
    """Sufficient statistics of a censored sample, accumulated in sorted order.

    Build with :func:`make_context`.  Sorting makes every sum independent of
    the row order of the input, so permuted samples give bitwise identical
    log-likelihoods.
    """

    n: int
    d: int
    failure_times: np.ndarray
    sum_log_t: float
    sum_log1p_t: float
    sum_t: float
    cens_times: np.ndarray
    cens_counts: np.ndarray
    scheme: object
    boundary: float | None = None
    quadrature: QuadratureConfig = field(default=DEFAULT_QUADRATURE)

    @property
    def n_censored(self) -> int:
        return self.n - self.d

    def all_times(self) -> np.ndarray:
        """Every observed time, sorted (censored ones repeated by multiplicity)."""
        return np.sort(np.concatenate([self.failure_times, np.repeat(self.cens_times, self.cens_counts)]))


def make_context(sample: CensoredSample, quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> LogLikContext:
    if sample.d == 0:
        raise AllCensoredError("all observations are censored; the likelihood has no interior maximum")
    fail = np.sort(sample.times[sample.status == 1])
    cens, counts = np.unique(sample.times[sample.status == 0], return_counts=True)
    fail.setflags(write=False)
    cens.setflags(write=False)
    counts = counts.astype(np.int64)
    counts.setflags(write=False)
    boundary = None
    if isinstance(sample.scheme, TypeI):
        boundary = float(sample.scheme.tc)
    elif isinstance(sample.scheme, TypeII):
        boundary = float(fail[-1])
    return LogLikContext(
        n=sample.n,
        d=sample.d,
        failure_times=fail,
        sum_log_t=math.fsum(np.log(fail)),
        sum_log1p_t=math.fsum(np.log1p(fail)),
        sum_t=math.fsum(fail),
        cens_times=cens,
        cens_counts=counts,
        scheme=sample.scheme,
        boundary=boundary,
        quadrature=quadrature,
    )


def _context(obj) -> LogLikContext:
    if isinstance(obj, LogLikContext):
        return obj
    if isinstance(obj, CensoredSample):
        return make_context(obj)
    raise TypeError(f"expected LogLikContext or CensoredSample, got {type(obj).__name__}")


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@jit
def _wl_censored(lam, phi, cens, counts, want_grad, rel_tol, abs_tol, max_sub):
    """Sum over censored times of m log A, and of its two partial derivatives."""
    s = lam + phi
    log_s = math.log(s)
    total = 0.0
    g_lam = 0.0
    g_phi = 0.0
    ok = True
    for j in range(cens.shape[0]):
        c = cens[j]
        m = counts[j]
        x = lam * c
        lx = math.log(x)
        log_g = _log_upper_gamma(phi, x)
        a = log_s + log_g
        b = phi * lx - x
        if a > b:
            log_a = a + math.log1p(math.exp(b - a))
        else:
            log_a = b + math.log1p(math.exp(a - b))
        total += m * log_a
        if want_grad:
            q = math.exp(b - log_g)
            ratio, good = _psi_scaled(phi, x, log_g, rel_tol, abs_tol, max_sub)
            ok = ok and good
            den = s + q
            g_lam += m * (1.0 - (c + 1.0) * q) / den
            g_phi += m * (1.0 + s * ratio + q * lx) / den
    return total, g_lam, g_phi, ok


@jit
def _wl_loglik_score(lam, phi, n, d, sum_log_t, sum_log1p_t, sum_t,
                     cens, counts, want_grad, rel_tol, abs_tol, max_sub):
    cens_ll, cg_lam, cg_phi, ok = _wl_censored(lam, phi, cens, counts, want_grad,
                                               rel_tol, abs_tol, max_sub)
    s = lam + phi
    ll = (sum_log1p_t + (phi - 1.0) * sum_log_t - lam * sum_t
          + d * (phi + 1.0) * math.log(lam) - n * math.log(s) - n * math.lgamma(phi)
          + cens_ll)
    g_lam = 0.0
    g_phi = 0.0
    if want_grad:
        g_lam = -sum_t + d * (phi + 1.0) / lam - n / s + cg_lam
        g_phi = sum_log_t + d * math.log(lam) - n / s - n * _digamma(phi) + cg_phi
    return ll, g_lam, g_phi, ok


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def loglik_and_score(params, ctx, want_grad: bool = True) -> tuple[float, np.ndarray | None]:
    """Log-likelihood and, when ``want_grad``, its gradient in ``(lambda, phi)``.

    Raises
    ------
    EvaluationError
        If the log-likelihood or the gradient is not finite.
    """
    params = _as_params(params)
    ctx = _context(ctx)
    q = ctx.quadrature
    ll, g_lam, g_phi, ok = _wl_loglik_score(
        params.lam, params.phi, ctx.n, ctx.d, ctx.sum_log_t, ctx.sum_log1p_t, ctx.sum_t,
        ctx.cens_times, ctx.cens_counts, want_grad, q.rel_tol, q.abs_tol, int(q.max_subdivisions),
    )
    if not ok:
        raise QuadratureError("score quadrature did not converge")
    if not math.isfinite(ll):
        raise EvaluationError(f"log-likelihood is not finite at {params}")
    if not want_grad:
        return ll, None
    grad = np.array([g_lam, g_phi])
    if not np.all(np.isfinite(grad)):
        raise EvaluationError(f"score is not finite at {params}")
    return ll, grad


def loglik(params, ctx) -> float:
    """Log-likelihood of the sample's censoring scheme (type II constant excluded)."""
    return loglik_and_score(params, ctx, want_grad=False)[0]


def score(params, ctx) -> np.ndarray:
    """Analytic gradient ``(dl/dlambda, dl/dphi)``."""
    return loglik_and_score(params, ctx, want_grad=True)[1]


def loglik_complete(params, times) -> float:
    """Complete-data log-likelihood ``sum log f(t_i)``."""
    return loglik(params, make_context(complete(times)))


def type2_constant(n: int, r: int) -> float:
    """``log(n!/(n-r)!)``, the parameter-free type II factor left out of :func:`loglik`."""
    return math.lgamma(n + 1) - math.lgamma(n - r + 1)


__all__ = [
    "LogLikContext",
    "make_context",
    "loglik",
    "score",
    "loglik_and_score",
    "loglik_complete",
    "type2_constant",
]
