from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlsurv import distribution as wl
from wlsurv.censoring import CensoredSample, apply_random, apply_type1, apply_type2, complete
from wlsurv.distribution import WLParams
from wlsurv.errors import AllCensoredError
from wlsurv.likelihood import loglik, loglik_and_score, loglik_complete, make_context, score, type2_constant


def random_case(rng):
    """Random (params, censored sample) pair covering all schemes."""
    lam = math.exp(rng.uniform(math.log(0.05), math.log(20.0)))
    phi = math.exp(rng.uniform(math.log(0.1), math.log(30.0)))
    p = WLParams(lam, phi)
    n = int(rng.integers(5, 60))
    t = wl.sample(p, n, rng)
    kind = rng.integers(0, 4)
    if kind == 0:
        s = complete(t)
    elif kind == 1:
        s = apply_type2(t, int(rng.integers(1, n + 1)))
    elif kind == 2:
        s = apply_type1(t, float(np.quantile(t, rng.uniform(0.3, 0.95))))
    else:
        s = apply_random(t, rng.uniform(0.0, 3.0 * t.mean(), n))
    if s.d == 0:
        s = complete(t)
    # evaluate away from the generating values too
    q = WLParams(lam * math.exp(rng.normal(0, 0.3)), phi * math.exp(rng.normal(0, 0.3)))
    return q, s


def central_diff(f, x, h):
    g = np.empty(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h[i]
        g[i] = (f(x + e) - f(x - e)) / (2 * h[i])
    return g


def test_score_matches_finite_differences_50_cases():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        p, s = random_case(rng)
        ctx = make_context(s)
        analytic = score(p, ctx)
        x = p.as_array()
        h = 1e-5 * x
        numeric = central_diff(lambda th: loglik(tuple(th), ctx), x, h)
        scale = np.maximum(np.abs(numeric), 1e-3 * abs(loglik(p, ctx)) / x)
        err = np.max(np.abs(analytic - numeric) / scale)
        worst = max(worst, err)
    assert worst < 1e-5


def oracle_loglik(p, s):
    """Sum of log f over failures and log S over censored units."""
    fail = s.times[s.status == 1]
    cens = s.times[s.status == 0]
    return math.fsum(wl.log_pdf(p, fail)) + math.fsum(wl.log_survival(p, cens)) if cens.size else \
        math.fsum(wl.log_pdf(p, fail))


@pytest.mark.parametrize("seed", range(6))
def test_loglik_equals_density_survival_sum(seed):
    rng = np.random.default_rng(seed)
    p, s = random_case(rng)
    assert loglik(p, s) == pytest.approx(oracle_loglik(p, s), rel=1e-11, abs=1e-9)


def test_degenerate_schemes_equal_complete():
    rng = np.random.default_rng(5)
    p = WLParams(0.7, 2.3)
    t = wl.sample(p, 30, rng)
    ref = loglik_complete(p, t)
    assert abs(loglik(p, apply_type2(t, 30)) - ref) <= 1e-12 * max(1.0, abs(ref))
    assert abs(loglik(p, apply_type1(t, math.inf)) - ref) <= 1e-12 * max(1.0, abs(ref))
    assert abs(loglik(p, apply_random(t, np.full(30, 1e300))) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_type2_constant():
    assert type2_constant(60, 49) == pytest.approx(math.lgamma(61) - math.lgamma(12))
    assert type2_constant(5, 5) == pytest.approx(math.log(120))


def test_rats_reference_value(rats):
    # reference value at a 4-digit rounded estimate; rounding on the ridge costs about 1e-3
    assert loglik(WLParams(0.0978, 21.7545), rats) == pytest.approx(-193.1714, abs=0.01)


def test_permutation_invariance_is_bitwise(rats):
    rng = np.random.default_rng(0)
    p = WLParams(0.1, 20.0)
    ll0, g0 = loglik_and_score(p, rats)
    for _ in range(5):
        idx = rng.permutation(rats.n)
        perm = CensoredSample(rats.times[idx], rats.status[idx], rats.scheme)
        ll, g = loglik_and_score(p, perm)
        assert ll == ll0
        assert np.array_equal(g, g0)


def test_all_censored_rejected():
    with pytest.raises(AllCensoredError):
        make_context(CensoredSample([1.0, 2.0], [0, 0]))


@settings(max_examples=60, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6))
def test_finite_over_parameter_box(log_lam, log_phi):
    from wlsurv.censoring import load_bundled

    s = load_bundled("rats")
    ll, g = loglik_and_score((10 ** log_lam, 10 ** log_phi), s)
    assert math.isfinite(ll) and np.all(np.isfinite(g))
