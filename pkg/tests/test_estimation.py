from __future__ import annotations

import math

import numpy as np
import pytest

from wlsurv import distribution as wl
from wlsurv.censoring import CensoredSample, apply_type2, complete
from wlsurv.distribution import WLParams
from wlsurv.errors import AllCensoredError, SingularInformationError
from wlsurv.estimation import (
    aic_table,
    fit,
    numeric_hessian,
    observed_information,
    standard_errors,
    wald_ci,
    z_value,
)
from wlsurv.likelihood import make_context, score
from wlsurv.models import get_family
from wlsurv.optimize import bfgs_maximize


def test_numeric_hessian_of_quadratic():
    A = np.array([[-3.0, 1.0], [1.0, -2.0]])
    H = numeric_hessian(lambda x: 0.5 * x @ A @ x, np.array([1.0, 2.0]))
    np.testing.assert_allclose(H, A, atol=1e-5)


def test_observed_information_matches_score_jacobian(devices):
    ctx = make_context(devices)
    p = np.array([0.526, 0.676])
    info = observed_information(p, ctx)
    jac = np.empty((2, 2))
    for j in range(2):
        h = 1e-6 * p[j]
        e = np.zeros(2)
        e[j] = h
        jac[:, j] = (score(tuple(p + e), ctx) - score(tuple(p - e), ctx)) / (2 * h)
    np.testing.assert_allclose(info, -jac, rtol=1e-4)
    np.testing.assert_allclose(info, info.T)


def test_devices_fit(devices):
    res = fit(devices)
    assert res.converged
    lam, phi = res.estimates
    assert lam == pytest.approx(0.5260, abs=5e-4)
    assert phi == pytest.approx(0.6764, abs=5e-4)
    assert res.std_errors[0] == pytest.approx(0.0954, rel=0.01)
    assert res.std_errors[1] == pytest.approx(0.1341, rel=0.01)
    assert res.aic == pytest.approx(185.1739, abs=1e-3)
    assert np.max(np.abs(res.gradient)) < 1e-4


def test_rats_fit_is_a_maximum(rats):
    res = fit(rats)
    assert res.converged
    assert np.all(np.linalg.eigvalsh(res.hessian) < 0)
    ctx = make_context(rats)
    g = score(res.params, ctx)
    assert np.max(np.abs(g * res.estimates)) < 1e-5


@pytest.mark.parametrize("model", ["weibull", "gamma"])
def test_comparison_families_score_consistent(rats, model):
    fam = get_family(model)
    ctx = make_context(rats)
    res = fit(ctx, model)
    theta = res.estimates * 1.05
    _, g = fam.loglik_and_score(theta, ctx)
    num = np.empty(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1e-6 * theta[i]
        num[i] = (fam.loglik_and_score(theta + e, ctx, False)[0] - fam.loglik_and_score(theta - e, ctx, False)[0]) / (2 * e[i])
    np.testing.assert_allclose(g, num, rtol=1e-5)


def test_weibull_matches_scipy_on_complete_data(rng):
    from scipy import stats

    t = rng.weibull(1.7, 300) * 2.0
    res = fit(complete(t), "weibull")
    k, _, s = stats.weibull_min.fit(t, floc=0)
    assert res.estimates[0] == pytest.approx(k, rel=1e-4)
    assert res.estimates[1] == pytest.approx(s, rel=1e-4)


def test_gamma_matches_scipy_on_complete_data(rng):
    from scipy import stats

    t = rng.gamma(2.5, 1 / 1.3, 300)
    res = fit(complete(t), "gamma")
    a, _, scale = stats.gamma.fit(t, floc=0)
    assert res.estimates[0] == pytest.approx(a, rel=1e-4)
    assert res.estimates[1] == pytest.approx(1 / scale, rel=1e-4)


@pytest.mark.parametrize("seed", range(4))
def test_recovers_parameters_at_large_n(seed):
    p = WLParams(2.0, 0.5)
    t = wl.sample(p, 3000, np.random.default_rng(seed))
    res = fit(apply_type2(t, 2400))
    z = (res.estimates - p.as_array()) / res.std_errors
    assert np.all(np.abs(z) < 4.5)


def test_wald_ci_and_z():
    assert z_value(0.95) == pytest.approx(1.959963984540054)
    ci = wald_ci(estimates=[1.0, 2.0], std_errors=[0.1, 0.5], level=0.9)
    np.testing.assert_allclose(ci[:, 1] - ci[:, 0], 2 * 1.6448536269514722 * np.array([0.1, 0.5]))


def test_singular_information():
    with pytest.raises(SingularInformationError):
        standard_errors(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularInformationError):
        standard_errors(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_all_censored_sample_rejected():
    with pytest.raises(AllCensoredError):
        fit(CensoredSample([1.0, 2.0, 3.0], [0, 0, 0]))


def test_fit_result_json_is_stable(devices):
    a = fit(devices).to_json()
    b = fit(devices).to_json()
    assert a == b
    assert '"lambda": 0.52601' in a


def test_aic_table_ranks(devices):
    rows = aic_table(devices)
    assert [r.family for r in rows][0] == "wl"
    aics = [r.aic for r in rows]
    assert aics == sorted(aics)
    for r in rows:
        assert r.aic == pytest.approx(-2 * r.loglik + 4)


def test_bfgs_on_rosenbrock_like():
    def fun(x):
        a, b = x
        f = -((1 - a) ** 2 + 10 * (b - a * a) ** 2)
        g = np.array([2 * (1 - a) + 40 * a * (b - a * a), -20 * (b - a * a)])
        return f, g

    res = bfgs_maximize(fun, np.array([-1.2, 1.0]), gtol=1e-8)
    assert res.converged
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-6)
    assert math.isfinite(res.fun)
