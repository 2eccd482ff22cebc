"""The Weighted Lindley lifetime distribution WL(lambda, phi).

Density::

    f(t) = lambda**(phi+1) / ((lambda+phi) Gamma(phi)) * t**(phi-1) (1+t) exp(-lambda t)

which is the mixture ``p Gamma(phi, lambda) + (1-p) Gamma(phi+1, lambda)``
with ``p = lambda / (lambda + phi)`` (gamma components in shape/rate form).
All evaluations go through log space; linear values are exponentiated at the
end so that large ``lambda * t`` does not underflow intermediate terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import jit
from .errors import ConvergenceError, DomainError
from .special import _log_upper_gamma


@dataclass(frozen=True)
class WLParams:
    """Parameter pair of the Weighted Lindley distribution.

    Parameters
    ----------
    lam : float
        Rate-like scale parameter (lambda > 0).
    phi : float
        Shape parameter (phi > 0).
    """

    lam: float
    phi: float

    def __post_init__(self):
        for name in ("lam", "phi"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer))
                    and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "phi", float(self.phi))

    @property
    def p(self) -> float:
        """Weight of the Gamma(phi, lambda) component."""
        return self.lam / (self.lam + self.phi)

    def as_array(self) -> np.ndarray:
        return np.array([self.lam, self.phi])


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@jit
def _logpdf(lam, phi, t):
    norm = (phi + 1.0) * math.log(lam) - math.log(lam + phi) - math.lgamma(phi)
    if t == 0.0:
        if phi > 1.0:
            return -math.inf
        return norm  # phi == 1: density limit lambda**2 / (lambda + 1)
    return norm + (phi - 1.0) * math.log(t) + math.log1p(t) - lam * t


@jit
def _log_numerator(lam, phi, x):
    """log((lambda+phi) Gamma(phi, x) + x**phi exp(-x)) for x > 0."""
    a = math.log(lam + phi) + _log_upper_gamma(phi, x)
    b = phi * math.log(x) - x
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@jit
def _logsf(lam, phi, t):
    if t == 0.0:
        return 0.0
    if t == math.inf:
        return -math.inf
    out = _log_numerator(lam, phi, lam * t) - math.log(lam + phi) - math.lgamma(phi)
    return min(out, 0.0)


@jit
def _logpdf_array(lam, phi, t):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _logpdf(lam, phi, t[i])
    return out


@jit
def _logsf_array(lam, phi, t):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _logsf(lam, phi, t[i])
    return out


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _as_params(params) -> WLParams:
    if isinstance(params, WLParams):
        return params
    lam, phi = params
    return WLParams(lam, phi)


def _prepare(t, allow_zero: bool):
    arr = np.asarray(t, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    if np.isnan(flat).any():
        raise DomainError("t must not be NaN")
    bad = flat < 0 if allow_zero else flat <= 0
    if bad.any():
        raise DomainError(f"t out of domain: {flat[bad][0]!r}")
    return arr, flat


def _finish(arr, values):
    if arr.ndim == 0:
        return float(values[0])
    return values.reshape(arr.shape)


def _check_density_domain(params: WLParams, flat):
    if (flat == 0).any() and params.phi < 1.0:
        raise DomainError("density diverges at t = 0 when phi < 1")
    if np.isinf(flat).any():
        raise DomainError("t must be finite")


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def log_pdf(params, t):
    """Log density.  ``t = 0`` is accepted only when ``phi >= 1``."""
    params = _as_params(params)
    arr, flat = _prepare(t, allow_zero=True)
    _check_density_domain(params, flat)
    return _finish(arr, _logpdf_array(params.lam, params.phi, flat))


def pdf(params, t):
    """Probability density function."""
    return np.exp(log_pdf(params, t)) if np.ndim(t) else math.exp(log_pdf(params, t))


def log_survival(params, t):
    """Log of the survival function ``P(T > t)``; 0 at ``t = 0``."""
    params = _as_params(params)
    arr, flat = _prepare(t, allow_zero=True)
    return _finish(arr, _logsf_array(params.lam, params.phi, flat))


def survival(params, t):
    """Survival function ``P(T > t)``."""
    return np.exp(log_survival(params, t)) if np.ndim(t) else math.exp(log_survival(params, t))


def cdf(params, t):
    """Distribution function ``1 - S(t)``, accurate for small ``t``."""
    value = log_survival(params, t)
    return -np.expm1(value) if np.ndim(t) else -math.expm1(value)


def hazard(params, t):
    """Hazard rate ``f(t) / S(t)``, evaluated as ``exp(log f - log S)``.

    Raises
    ------
    OverflowError
        If the survival function underflows even in log space.
    """
    params = _as_params(params)
    arr, flat = _prepare(t, allow_zero=True)
    _check_density_domain(params, flat)
    lf = _logpdf_array(params.lam, params.phi, flat)
    ls = _logsf_array(params.lam, params.phi, flat)
    if np.isinf(ls).any():
        raise OverflowError("survival underflows in log space; hazard is not representable")
    return _finish(arr, np.exp(lf - ls))


def moments(params) -> tuple[float, float]:
    """Mean and variance."""
    params = _as_params(params)
    lam, phi = params.lam, params.phi
    s = lam + phi
    mean = phi * (s + 1.0) / (lam * s)
    var = ((phi + 1.0) * s * s - lam * lam) / (lam * lam * s * s)
    return mean, var


def quantile(params, p: float, *, tol: float = 1e-10, max_iter: int = 500) -> float:
    """Return ``t`` with ``1 - S(t) = p``.

    Bisection on a bracket that starts at ``[0, mean + 20 sd]`` (expanded if
    needed), followed by Newton polishing once the bracket is narrower than
    1e-6.  The result satisfies ``|F(t) - p| <= tol``.
    """
    params = _as_params(params)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    if p > 1.0 - 1e-12:
        raise DomainError("p beyond 1 - 1e-12: quantile exceeds the bracketing limit")

    def resid(t):
        return cdf(params, t) - p

    mean, var = moments(params)
    lo, hi = 0.0, mean + 20.0 * math.sqrt(var)
    for _ in range(200):
        if resid(hi) >= 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ConvergenceError("could not bracket the quantile")

    for _ in range(max_iter):
        if hi - lo < 1e-6 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if resid(mid) > 0:
            hi = mid
        else:
            lo = mid
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = resid(t)
        if abs(r) <= tol:
            return t
        if r > 0:
            hi = t
        else:
            lo = t
        dens = pdf(params, t) if t > 0 else 0.0
        polished = t - r / dens if dens > 0 else math.nan
        t = polished if lo < polished < hi else 0.5 * (lo + hi)
        if hi - lo <= 4.0 * np.finfo(float).eps * max(t, 1e-300):
            break
    raise ConvergenceError(f"quantile({p}) did not reach tolerance {tol}")


def sample(params, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. lifetimes through the two-component gamma mixture.

    The component is Gamma(phi, lambda) with probability ``p`` and
    Gamma(phi + 1, lambda) otherwise.
    """
    params = _as_params(params)
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    second = rng.random(n) >= params.p
    shape = params.phi + second.astype(float)
    return rng.gamma(shape, 1.0 / params.lam)


__all__ = [
    "WLParams",
    "pdf",
    "log_pdf",
    "survival",
    "log_survival",
    "cdf",
    "hazard",
    "moments",
    "quantile",
    "sample",
]
