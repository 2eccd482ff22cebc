from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special as sps

from wlsurv import distribution as wl
from wlsurv.distribution import WLParams
from wlsurv.errors import CalibrationError, DomainError
from wlsurv.montecarlo import (
    ReplicateOutcome,
    StudyConfig,
    aggregate,
    calibrate_random,
    calibrate_type1,
    censored_fraction_uniform,
    replicate_rng,
    resolve_workers,
    run_replicate,
    run_study,
)

P = WLParams(2.0, 0.5)


def closed_form_fraction(p, u):
    """(1/u) int_0^u S via u S(u) + E[T; T <= u] for the gamma mixture."""
    x = p.lam * u
    partial = (p.p * p.phi * sps.gammainc(p.phi + 1, x)
               + (1 - p.p) * (p.phi + 1) * sps.gammainc(p.phi + 2, x)) / p.lam
    return (u * wl.survival(p, u) + partial) / u


def test_calibrate_type1_round_trip():
    for p_star in (0.2, 0.4):
        tc = calibrate_type1(P, p_star)
        assert wl.survival(P, tc) == pytest.approx(p_star, abs=1e-9)


@pytest.mark.parametrize("params", [P, WLParams(3.0, 2.0), WLParams(2.0, 3.0)])
@pytest.mark.parametrize("p_star", [0.2, 0.4])
def test_calibrate_random_against_closed_form(params, p_star):
    u = calibrate_random(params, p_star)
    assert closed_form_fraction(params, u) == pytest.approx(p_star, abs=1e-10)
    assert censored_fraction_uniform(params, u) == pytest.approx(p_star, abs=1e-11)


def test_calibrate_random_monte_carlo():
    u = calibrate_random(P, 0.2)
    rng = np.random.default_rng(99)
    t = wl.sample(P, 100_000, rng)
    c = rng.uniform(0, u, t.size)
    assert np.mean(t > c) == pytest.approx(0.2, abs=0.02)


def test_calibration_limits():
    with pytest.raises(CalibrationError):
        calibrate_random(P, 1.0)
    # F(u) grows like sqrt(u) when phi = 0.5
    assert censored_fraction_uniform(P, 1e-8) == pytest.approx(1.0, abs=1e-3)
    assert censored_fraction_uniform(P, 1e4) < 1e-3


def test_config_validation():
    cfg = StudyConfig(P, 100, "type2", p_target=0.2)
    assert cfg.r == 80
    assert StudyConfig(P, 25, "type2", p_target=0.4).r == 15
    with pytest.raises(DomainError):
        StudyConfig(P, 100, "type2")
    with pytest.raises(DomainError):
        StudyConfig(P, 100, "type1")
    with pytest.raises(DomainError):
        StudyConfig(P, 100, "complete", replicates=0)
    with pytest.raises(DomainError):
        StudyConfig(P, 100, "weird")
    with pytest.raises(DomainError):
        StudyConfig(P, 100, "complete", r=3)


def test_replicate_streams_are_independent_of_order():
    a = replicate_rng(7, 3).random(5)
    replicate_rng(7, 0).random(100)
    b = replicate_rng(7, 3).random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, replicate_rng(7, 4).random(5))


def test_single_replicate_report_equals_replicate():
    cfg = StudyConfig(P, 50, "random", p_target=0.2, replicates=1, seed=11)
    rep = run_study(cfg)
    one = run_replicate(cfg, 0)
    assert one.converged
    lam, phi = one.estimates
    assert rep.mre["lambda"] == lam / P.lam and rep.mre["phi"] == phi / P.phi
    assert rep.mse["lambda"] == (lam - P.lam) ** 2
    assert rep.bias["phi"] == phi - P.phi
    assert rep.coverage["phi"] == float(one.covered[1])
    assert rep.mean_censored == one.censored_fraction


def test_report_invariants():
    cfg = StudyConfig(P, 40, "type1", p_target=0.4, replicates=60, seed=5)
    rep = run_study(cfg)
    assert rep.attempted == rep.converged + rep.discarded == 60
    for name in ("lambda", "phi"):
        assert 0.0 <= rep.coverage[name] <= 1.0
        assert rep.mse[name] >= rep.bias[name] ** 2 * (1 - 1e-12)
    assert rep.to_csv().splitlines()[0].startswith("n,MRE_phi")


def test_discard_limit_aborts():
    cfg = StudyConfig(P, 10, "complete", replicates=10)
    bad = [ReplicateOutcome(i, i >= 3, (2.0, 0.5), (True, True), 0.0, "" if i >= 3 else "x") for i in range(10)]
    with pytest.raises(CalibrationError):
        aggregate(cfg, bad)
    ok = aggregate(cfg, bad[2:])
    assert ok.discarded == 1 and ok.attempted == 8


def test_parallel_equals_serial():
    cfg = StudyConfig(P, 30, "random", p_target=0.4, replicates=24, seed=3)
    assert run_study(cfg, workers=1).to_json() == run_study(cfg, workers=3, chunk_size=5).to_json()


def test_worker_resolution(monkeypatch):
    monkeypatch.setenv("WLSURV_THREADS", "3")
    assert resolve_workers() == 3
    monkeypatch.setenv("WLSURV_THREADS", "0")
    assert resolve_workers() >= 1
    assert resolve_workers(2) == 2
    monkeypatch.setenv("WLSURV_THREADS", "x")
    with pytest.raises(DomainError):
        resolve_workers()


@pytest.mark.slow
def test_mse_decreases_with_n():
    mses = []
    for n in (5, 25, 100):
        rep = run_study(StudyConfig(WLParams(2.0, 3.0), n, "type2", p_target=0.2, replicates=300, seed=1))
        mses.append((rep.mse["lambda"], rep.mse["phi"]))
    assert mses[2][0] < mses[1][0] < mses[0][0]
    assert mses[2][1] < mses[1][1] < mses[0][1]


@pytest.mark.slow
@pytest.mark.parametrize("scheme", ["type1", "random"])
def test_realized_censoring_fraction(scheme):
    rep = run_study(StudyConfig(WLParams(3.0, 2.0), 100, scheme, p_target=0.4, replicates=400, seed=2))
    assert rep.mean_censored == pytest.approx(0.4, abs=0.02)
    assert math.isclose(rep.mre["phi"], 1.0, abs_tol=0.05)
