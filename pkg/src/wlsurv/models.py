"""Two-parameter lifetime families fitted side by side for model comparison.

Parameterizations:

* Weighted Lindley  ``(lambda, phi)``;
* Weibull           ``(shape k, scale s)`` with ``S(t) = exp(-(t/s)**k)``;
* Gamma             ``(shape alpha, rate beta)`` with ``S(t) = Gamma(alpha, beta t) / Gamma(alpha)``.

Each family evaluates its censored log-likelihood from a
:class:`~wlsurv.likelihood.LogLikContext`, so the same sample summary serves
all three.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize as sopt

from . import distribution as wl
from ._jit import jit
from .errors import DomainError, EvaluationError, QuadratureError
from .likelihood import LogLikContext, loglik_and_score
from .special import _digamma, _log_upper_gamma, _psi_scaled

_GRID = (0.01, 1.0, 100.0)


class Family:
    name: str = ""
    label: str = ""
    param_names: tuple[str, str] = ("", "")

    @property
    def k(self) -> int:
        return len(self.param_names)

    def loglik_and_score(self, theta, ctx: LogLikContext, want_grad=True):
        raise NotImplementedError

    def log_pdf(self, theta, t):
        raise NotImplementedError

    def log_survival(self, theta, t):
        raise NotImplementedError

    def moment_start(self, ctx: LogLikContext):
        """Moment-matched starting point, or ``None`` if it cannot be formed."""
        raise NotImplementedError

    def grid_starts(self, ctx: LogLikContext):
        raise NotImplementedError

    def survival(self, theta, t):
        return np.exp(self.log_survival(theta, t))

    def __repr__(self):
        return f"<{type(self).__name__}>"


def _failure_moments(ctx: LogLikContext):
    t = ctx.failure_times
    if t.size < 2:
        return None
    m = float(np.mean(t))
    v = float(np.var(t, ddof=1))
    if not (m > 0 and v > 0):
        return None
    return m, v


class WeightedLindley(Family):
    name = "wl"
    label = "Weighted Lindley"
    param_names = ("lambda", "phi")

    def loglik_and_score(self, theta, ctx, want_grad=True):
        return loglik_and_score(wl.WLParams(theta[0], theta[1]), ctx, want_grad)

    def log_pdf(self, theta, t):
        return wl.log_pdf(tuple(theta), t)

    def log_survival(self, theta, t):
        return wl.log_survival(tuple(theta), t)

    def moment_start(self, ctx):
        mom = _failure_moments(ctx)
        if mom is None:
            return None
        m, v = mom

        def resid(y):
            lam, phi = np.exp(y)
            mean, var = wl.moments(wl.WLParams(lam, phi))
            return [mean / m - 1.0, var / v - 1.0]

        y0 = np.log([m / v, m * m / v])
        try:
            sol = sopt.root(resid, y0, method="hybr")
        except (ValueError, OverflowError, DomainError):
            return None
        if not sol.success or not np.all(np.isfinite(sol.x)):
            return None
        if np.max(np.abs(resid(sol.x))) > 1e-6:
            return None
        return np.exp(sol.x)

    def grid_starts(self, ctx):
        return [np.array([a, b]) for a in _GRID for b in _GRID]


class Weibull(Family):
    name = "weibull"
    label = "Weibull"
    param_names = ("shape", "scale")

    def loglik_and_score(self, theta, ctx, want_grad=True):
        k, s = float(theta[0]), float(theta[1])
        times = ctx.all_times()
        z = times / s
        zk = z ** k
        ll = ctx.d * (math.log(k) - k * math.log(s)) + (k - 1.0) * ctx.sum_log_t - math.fsum(zk)
        if not math.isfinite(ll):
            raise EvaluationError(f"Weibull log-likelihood not finite at {theta}")
        if not want_grad:
            return ll, None
        g_k = ctx.d * (1.0 / k - math.log(s)) + ctx.sum_log_t - math.fsum(zk * np.log(z))
        g_s = -ctx.d * k / s + (k / s) * math.fsum(zk)
        grad = np.array([g_k, g_s])
        if not np.all(np.isfinite(grad)):
            raise EvaluationError(f"Weibull score not finite at {theta}")
        return ll, grad

    def log_pdf(self, theta, t):
        k, s = theta
        t = np.asarray(t, dtype=float)
        z = t / s
        return np.log(k / s) + (k - 1.0) * np.log(z) - z ** k

    def log_survival(self, theta, t):
        k, s = theta
        return -(np.asarray(t, dtype=float) / s) ** k

    def moment_start(self, ctx):
        logs = np.log(ctx.failure_times)
        if logs.size < 2 or np.std(logs) <= 0:
            return None
        k = 1.2825 / float(np.std(logs, ddof=1))
        s = math.exp(float(np.mean(logs)) + 0.5772156649015329 / k)
        return np.array([k, s])

    def grid_starts(self, ctx):
        m = float(np.mean(ctx.failure_times))
        return [np.array([a, m * b]) for a in (0.1, 1.0, 10.0) for b in (0.1, 1.0, 10.0)]


@jit
def _gamma_loglik_score(alpha, beta, d, sum_log_t, sum_t, cens, counts, want_grad,
                        rel_tol, abs_tol, max_sub):
    lga = math.lgamma(alpha)
    ll = d * (alpha * math.log(beta) - lga) + (alpha - 1.0) * sum_log_t - beta * sum_t
    g_a = 0.0
    g_b = 0.0
    psi_a = 0.0
    if want_grad:
        psi_a = _digamma(alpha)
        g_a = d * (math.log(beta) - psi_a) + sum_log_t
        g_b = d * alpha / beta - sum_t
    ok = True
    for j in range(cens.shape[0]):
        c = cens[j]
        m = counts[j]
        x = beta * c
        log_g = _log_upper_gamma(alpha, x)
        ll += m * (log_g - lga)
        if want_grad:
            ratio, good = _psi_scaled(alpha, x, log_g, rel_tol, abs_tol, max_sub)
            ok = ok and good
            g_a += m * (ratio - psi_a)
            g_b -= m * c * math.exp((alpha - 1.0) * math.log(x) - x - log_g)
    return ll, g_a, g_b, ok


class Gamma(Family):
    name = "gamma"
    label = "Gamma"
    param_names = ("shape", "rate")

    def loglik_and_score(self, theta, ctx, want_grad=True):
        a, b = float(theta[0]), float(theta[1])
        q = ctx.quadrature
        ll, g_a, g_b, ok = _gamma_loglik_score(
            a, b, ctx.d, ctx.sum_log_t, ctx.sum_t, ctx.cens_times, ctx.cens_counts,
            want_grad, q.rel_tol, q.abs_tol, int(q.max_subdivisions),
        )
        if not ok:
            raise QuadratureError("gamma score quadrature did not converge")
        if not math.isfinite(ll):
            raise EvaluationError(f"Gamma log-likelihood not finite at {theta}")
        if not want_grad:
            return ll, None
        grad = np.array([g_a, g_b])
        if not np.all(np.isfinite(grad)):
            raise EvaluationError(f"Gamma score not finite at {theta}")
        return ll, grad

    def log_pdf(self, theta, t):
        a, b = theta
        t = np.asarray(t, dtype=float)
        return a * math.log(b) - math.lgamma(a) + (a - 1.0) * np.log(t) - b * t

    def log_survival(self, theta, t):
        a, b = float(theta[0]), float(theta[1])
        t = np.asarray(t, dtype=float)
        lga = math.lgamma(a)
        out = np.array([_log_upper_gamma(a, b * v) - lga for v in t.ravel()])
        return np.minimum(out, 0.0).reshape(t.shape) if t.ndim else float(min(out[0], 0.0))

    def moment_start(self, ctx):
        mom = _failure_moments(ctx)
        if mom is None:
            return None
        m, v = mom
        return np.array([m * m / v, m / v])

    def grid_starts(self, ctx):
        m = float(np.mean(ctx.failure_times))
        return [np.array([a, a * b / m]) for a in (0.1, 1.0, 10.0) for b in (0.1, 1.0, 10.0)]


FAMILIES: dict[str, Family] = {f.name: f for f in (WeightedLindley(), Weibull(), Gamma())}


@dataclass(frozen=True)
class ComparisonModel:
    """A family together with a concrete parameter vector."""

    family: Family
    params: tuple[float, ...]

    def log_pdf(self, t):
        return self.family.log_pdf(self.params, t)

    def log_survival(self, t):
        return self.family.log_survival(self.params, t)

    def survival(self, t):
        return self.family.survival(self.params, t)


def get_family(name) -> Family:
    if isinstance(name, Family):
        return name
    key = str(name).lower()
    aliases = {"weightedlindley": "wl", "weighted_lindley": "wl", "lindley": "wl"}
    key = aliases.get(key, key)
    try:
        return FAMILIES[key]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(FAMILIES)}") from None


__all__ = ["Family", "WeightedLindley", "Weibull", "Gamma", "FAMILIES", "ComparisonModel", "get_family"]
