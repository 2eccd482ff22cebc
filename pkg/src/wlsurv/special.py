"""Scalar special functions used by every likelihood evaluation.

The incomplete gamma function uses the power series below ``x = a + 1`` and a
modified-Lentz continued fraction above it, always in log space.  The
parameter derivative of the upper incomplete gamma,

    Psi(k, x) = integral_x^inf w**(k-1) * log(w) * exp(-w) dw,

is obtained by adaptive Gauss-Kronrod quadrature after substitutions that
remove the endpoint singularity at ``w = 0`` and map the infinite tail onto a
finite interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import jit
from .errors import DomainError, QuadratureError

_EPS = 2.220446049250313e-16
_FPMIN = 1e-300
_MAX_SERIES = 100000


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive quadrature behind :func:`psi_integral`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-300
    max_subdivisions: int = 200

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if not self.abs_tol >= 0:
            raise DomainError("abs_tol must be nonnegative")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer")


DEFAULT_QUADRATURE = QuadratureConfig()

# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@jit
def _lgamma(a):
    return math.lgamma(a)


@jit
def _digamma(a):
    acc = 0.0
    while a < 10.0:
        acc -= 1.0 / a
        a += 1.0
    f = 1.0 / (a * a)
    tail = f * (
        1.0 / 12.0
        - f * (1.0 / 120.0
               - f * (1.0 / 252.0
                      - f * (1.0 / 240.0
                             - f * (1.0 / 132.0
                                    - f * (691.0 / 32760.0
                                           - f * (1.0 / 12.0))))))
    )
    return acc + math.log(a) - 0.5 / a - tail


@jit
def _log_upper_gamma(a, x):
    """log Gamma(a, x) for a > 0, x >= 0."""
    lg = math.lgamma(a)
    if x == 0.0:
        return lg
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(_MAX_SERIES):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        log_lower = a * math.log(x) - x + math.log(total)
        p = math.exp(log_lower - lg)
        if p >= 1.0:
            # lower part exhausts the complete gamma at this precision
            return -math.inf
        return lg + math.log1p(-p)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_SERIES):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return a * math.log(x) - x + math.log(h)


# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

# integrand kinds for _psi_integrand
_LOW_FINITE = 0   # w = exp(-s), s in [0, -log x]
_LOW_MAPPED = 1   # w = exp(-s), s = c v / (1 - v), v in [0, 1)
_TAIL_MAPPED = 2  # w = m + u,    u = c v / (1 - v), v in [0, 1); shift is pre-offset


@jit
def _psi_integrand(kind, v, k, m, shift, c):
    # every branch returns the integrand divided by exp(shift)
    if kind == _LOW_FINITE:
        return -v * math.exp(-k * v - math.exp(-v) - shift)
    if kind == _LOW_MAPPED:
        one = 1.0 - v
        s = c * v / one
        return -s * math.exp(-k * s - math.exp(-s) - shift) * c / (one * one)
    # tail: shift already holds (k-1) log m - m - log-scale, so only O(u)
    # terms vary between nodes and large m loses no relative accuracy
    one = 1.0 - v
    u = c * v / one
    rel = math.log1p(u / m)
    return math.exp(shift + (k - 1.0) * rel - u) * (math.log(m) + rel) * c / (one * one)


@jit
def _gk15(kind, k, m, shift, c, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = _psi_integrand(kind, center, k, m, shift, c)
    res_k = fc * _WGK[7]
    res_g = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        f1 = _psi_integrand(kind, center - dx, k, m, shift, c)
        f2 = _psi_integrand(kind, center + dx, k, m, shift, c)
        res_k += _WGK[j] * (f1 + f2)
        if j % 2 == 1:
            res_g += _WG[j // 2] * (f1 + f2)
    return res_k * half, abs((res_k - res_g) * half)


@jit
def _adaptive(kind, k, m, shift, c, lo, hi, rel_tol, abs_tol, max_sub):
    """Globally adaptive GK15.  Returns (value, error, ok)."""
    a_ = np.empty(max_sub)
    b_ = np.empty(max_sub)
    r_ = np.empty(max_sub)
    e_ = np.empty(max_sub)
    r0, e0 = _gk15(kind, k, m, shift, c, lo, hi)
    a_[0] = lo
    b_[0] = hi
    r_[0] = r0
    e_[0] = e0
    count = 1
    while True:
        total = 0.0
        err = 0.0
        worst = 0
        for i in range(count):
            total += r_[i]
            err += e_[i]
            if e_[i] > e_[worst]:
                worst = i
        if err <= max(abs_tol, rel_tol * abs(total)):
            return total, err, True
        if count >= max_sub:
            return total, err, False
        mid = 0.5 * (a_[worst] + b_[worst])
        rl, el = _gk15(kind, k, m, shift, c, a_[worst], mid)
        rr, er = _gk15(kind, k, m, shift, c, mid, b_[worst])
        a_[count] = mid
        b_[count] = b_[worst]
        r_[count] = rr
        e_[count] = er
        b_[worst] = mid
        r_[worst] = rl
        e_[worst] = el
        count += 1


@jit
def _psi_scaled(k, x, shift, rel_tol, abs_tol, max_sub):
    """Psi(k, x) * exp(-shift).  Returns (value, ok)."""
    total = 0.0
    ok = True
    if x < 1.0:
        if x == 0.0:
            r, e, good = _adaptive(_LOW_MAPPED, k, 0.0, shift, max(1.0, 1.0 / k),
                                   0.0, 1.0, rel_tol, abs_tol, max_sub)
        else:
            r, e, good = _adaptive(_LOW_FINITE, k, 0.0, shift, 1.0,
                                   0.0, -math.log(x), rel_tol, abs_tol, max_sub)
        total += r
        ok = ok and good
        m = 1.0
    else:
        m = x
    base = (k - 1.0) * math.log(m) - m - shift
    r, e, good = _adaptive(_TAIL_MAPPED, k, m, base, max(1.0, k - 1.0 - m),
                           0.0, 1.0, rel_tol, abs_tol, max_sub)
    return total + r, ok and good


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def _check_positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _check_nonnegative(name, value):
    value = float(value)
    if math.isnan(value) or value < 0.0:
        raise DomainError(f"{name} must be nonnegative, got {value!r}")
    return value


def log_gamma(a: float) -> float:
    """Natural log of the gamma function for ``a > 0``."""
    return _lgamma(_check_positive("a", a))


def digamma(a: float) -> float:
    """Logarithmic derivative of the gamma function for ``a > 0``."""
    return _digamma(_check_positive("a", a))


def log_upper_inc_gamma(a: float, x: float) -> float:
    """log Gamma(a, x), finite far beyond the point where Gamma(a, x) underflows."""
    a = _check_positive("a", a)
    x = _check_nonnegative("x", x)
    if math.isinf(x):
        return -math.inf
    return _log_upper_gamma(a, x)


def upper_inc_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma function ``integral_x^inf w**(a-1) exp(-w) dw``."""
    return math.exp(log_upper_inc_gamma(a, x))


def psi_integral(k: float, x: float, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``integral_x^inf w**(k-1) log(w) exp(-w) dw``, the k-derivative of Gamma(k, x).

    Raises
    ------
    QuadratureError
        If the subdivision budget in ``config`` is exhausted before the
        requested tolerance is met.
    """
    k = _check_positive("k", k)
    x = _check_nonnegative("x", x)
    if math.isinf(x):
        return 0.0
    log_g = _log_upper_gamma(k, x)
    value, ok = _psi_scaled(k, x, log_g, config.rel_tol, config.abs_tol,
                            int(config.max_subdivisions))
    if not ok:
        raise QuadratureError(
            f"psi_integral({k}, {x}) did not reach rel_tol={config.rel_tol} "
            f"within {config.max_subdivisions} subdivisions"
        )
    return value * math.exp(log_g)


def psi_ratio(k: float, x: float, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``psi_integral(k, x) / upper_inc_gamma(k, x)``, computed without under/overflow."""
    k = _check_positive("k", k)
    x = _check_nonnegative("x", x)
    log_g = _log_upper_gamma(k, x)
    value, ok = _psi_scaled(k, x, log_g, config.rel_tol, config.abs_tol,
                           int(config.max_subdivisions))
    if not ok:
        raise QuadratureError(f"psi_ratio({k}, {x}) did not converge")
    return value


__all__ = [
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "log_gamma",
    "digamma",
    "upper_inc_gamma",
    "log_upper_inc_gamma",
    "psi_integral",
    "psi_ratio",
]
