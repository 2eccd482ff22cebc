"""Monte Carlo study of the maximum likelihood estimators under censoring.

Each replicate draws ``n`` Weighted Lindley lifetimes, censors them, fits the
model and records the estimates and whether each Wald interval covers the
true value.  Replicate ``i`` owns a Philox stream keyed by ``(seed, i)``, and
aggregation runs in replicate order, so the report does not depend on how
replicates are spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import distribution as wl
from .censoring import apply_random, apply_type1, apply_type2, complete
from .distribution import WLParams
from .errors import (
    AllCensoredError,
    BoundaryDriftError,
    CalibrationError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    QuadratureError,
)
from .estimation import _sig, fit

SCHEMES = ("complete", "type1", "type2", "random")
# reporting order follows the usual table layout: shape first, then rate
REPORT_ORDER = ("phi", "lambda")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class StudyConfig:
    """Settings of one simulation cell.

    ``p_target`` is the intended censored fraction.  Type II may give ``r``
    directly instead; otherwise ``r = round((1 - p_target) n)``.
    """

    params: WLParams
    n: int
    scheme: str = "complete"
    p_target: float | None = None
    r: int | None = None
    replicates: int = 2000
    seed: int = 0
    level: float = 0.95
    max_discard: float = 0.2

    def __post_init__(self):
        if not isinstance(self.params, WLParams):
            object.__setattr__(self, "params", wl._as_params(self.params))
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise DomainError(f"replicates must be a positive integer, got {self.replicates!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level!r}")
        if not 0.0 <= self.max_discard <= 1.0:
            raise DomainError(f"max_discard must lie in [0, 1], got {self.max_discard!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "replicates", int(self.replicates))
        object.__setattr__(self, "seed", int(self.seed))
        # the range of p_target is checked by calibration, which reports an
        # unattainable target as CalibrationError
        if self.p_target is not None and not math.isfinite(self.p_target):
            raise DomainError(f"p_target must be finite, got {self.p_target!r}")
        if self.scheme in ("type1", "random") and self.p_target is None:
            raise DomainError(f"scheme {self.scheme} needs p_target")
        if self.scheme == "type2":
            r = self.r
            if r is None:
                if self.p_target is None:
                    raise DomainError("type2 needs r or p_target")
                r = _round_half_up((1.0 - self.p_target) * self.n)
            if int(r) != r or not 1 <= r <= self.n:
                raise DomainError(f"type2 r must satisfy 1 <= r <= n={self.n}, got {r!r}")
            object.__setattr__(self, "r", int(r))
        elif self.r is not None:
            raise DomainError("r only applies to type2")

    def describe(self) -> dict:
        return {
            "phi": _sig(self.params.phi),
            "lambda": _sig(self.params.lam),
            "n": self.n,
            "scheme": self.scheme,
            "p_target": None if self.p_target is None else _sig(self.p_target),
            "r": self.r,
            "replicates": self.replicates,
            "seed": self.seed,
            "level": _sig(self.level),
            "max_discard": _sig(self.max_discard),
        }


# ---------------------------------------------------------------------------
# calibration
# ---------------------------------------------------------------------------


def calibrate_type1(params, p_star: float) -> float:
    """Censoring time ``t_c`` with ``S(t_c) = p_star``."""
    if not 0.0 < p_star < 1.0:
        raise DomainError(f"p_star must lie in (0, 1), got {p_star!r}")
    return wl.quantile(params, 1.0 - p_star)


def censored_fraction_uniform(params, u: float) -> float:
    """``P(T > C)`` for ``C ~ Uniform(0, u)``, i.e. ``(1/u) int_0^u S(t) dt``."""
    params = wl._as_params(params)
    if not u > 0:
        raise DomainError(f"u must be positive, got {u!r}")
    val, _ = integrate.quad(lambda t: wl.survival(params, t), 0.0, u,
                            epsabs=1e-13, epsrel=1e-11, limit=200)
    return val / u


def calibrate_random(params, p_star: float) -> float:
    """Upper bound ``u`` of uniform censoring times giving censored fraction ``p_star``.

    ``(1/u) int_0^u S`` falls from 1 at ``u -> 0`` towards 0, so any
    ``p_star`` in ``(0, 1)`` has a unique root, found with Brent's method.

    Raises
    ------
    CalibrationError
        If ``p_star`` lies outside ``(0, 1)`` or no bracket is found.
    """
    params = wl._as_params(params)
    if not 0.0 < p_star < 1.0:
        raise CalibrationError(f"censoring proportion {p_star!r} is unattainable; it must lie in (0, 1)")

    def g(u):
        return censored_fraction_uniform(params, u) - p_star

    mean, _ = wl.moments(params)
    lo = hi = mean
    for _ in range(200):
        if g(lo) > 0:
            break
        lo *= 0.5
    else:
        raise CalibrationError("no lower bracket for the uniform censoring bound")
    for _ in range(200):
        if g(hi) < 0:
            break
        hi *= 2.0
    else:
        raise CalibrationError("no upper bracket for the uniform censoring bound")
    return optimize.brentq(g, lo, hi, xtol=1e-14 * hi, rtol=1e-13, maxiter=200)


def calibrate(config: StudyConfig) -> float | None:
    """Scheme constant: ``t_c`` for type I, ``u`` for random, else ``None``."""
    try:
        if config.scheme == "type1":
            return calibrate_type1(config.params, config.p_target)
        if config.scheme == "random":
            return calibrate_random(config.params, config.p_target)
    except (DomainError, ConvergenceError, ValueError) as exc:
        if isinstance(exc, CalibrationError):
            raise
        raise CalibrationError(f"calibration failed: {exc}") from exc
    return None


# ---------------------------------------------------------------------------
# replicates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplicateOutcome:
    """Result of one replicate; estimates and coverage are in ``(lambda, phi)`` order."""

    index: int
    converged: bool
    estimates: tuple[float, float]
    covered: tuple[bool, bool]
    censored_fraction: float
    reason: str = ""


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator owned by replicate ``index``."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def run_replicate(config: StudyConfig, index: int, constant: float | None = None) -> ReplicateOutcome:
    if constant is None:
        constant = calibrate(config)
    rng = replicate_rng(config.seed, index)
    t = wl.sample(config.params, config.n, rng)
    if config.scheme == "type1":
        sample = apply_type1(t, constant)
    elif config.scheme == "type2":
        sample = apply_type2(t, config.r)
    elif config.scheme == "random":
        sample = apply_random(t, rng.uniform(0.0, constant, config.n))
    else:
        sample = complete(t)
    frac = sample.censored_fraction
    nan2 = (math.nan, math.nan)
    try:
        res = fit(sample, "wl", level=config.level)
    except (AllCensoredError, BoundaryDriftError, EvaluationError, QuadratureError, DomainError) as exc:
        return ReplicateOutcome(index, False, nan2, (False, False), frac, type(exc).__name__)
    est = tuple(float(v) for v in res.estimates)
    if not res.converged:
        return ReplicateOutcome(index, False, est, (False, False), frac, "not converged")
    if not np.all(np.isfinite(res.std_errors)):
        return ReplicateOutcome(index, False, est, (False, False), frac, "singular information")
    truth = config.params.as_array()
    covered = tuple(bool(lo <= th <= hi) for th, (lo, hi) in zip(truth, res.ci_95))
    return ReplicateOutcome(index, True, est, covered, frac)


def _run_chunk(config: StudyConfig, constant, indices) -> list[ReplicateOutcome]:
    return [run_replicate(config, i, constant) for i in indices]


def resolve_workers(workers: int | None = None) -> int:
    """Worker count from the argument, else ``WLSURV_THREADS``; ``0`` means one per CPU."""
    if workers is None:
        raw = os.environ.get("WLSURV_THREADS", "1").strip() or "1"
        try:
            workers = int(raw)
        except ValueError:
            raise DomainError(f"WLSURV_THREADS must be an integer, got {raw!r}") from None
    if workers < 0:
        raise DomainError(f"worker count must be >= 0, got {workers}")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


@dataclass
class SimulationReport:
    """Aggregated study results, keyed by parameter name."""

    config: StudyConfig
    mre: dict
    mse: dict
    bias: dict
    coverage: dict
    mean_censored: float
    attempted: int
    converged: int
    discarded: int
    calibration: float | None = None

    def to_dict(self) -> dict:
        def block(d):
            return {k: _sig(d[k]) for k in REPORT_ORDER}

        return {
            "config": self.config.describe(),
            "calibration": None if self.calibration is None else _sig(self.calibration),
            "mre": block(self.mre),
            "mse": block(self.mse),
            "bias": block(self.bias),
            "coverage": block(self.coverage),
            "mean_censored_fraction": _sig(self.mean_censored),
            "replicates": {
                "attempted": self.attempted,
                "converged": self.converged,
                "discarded": self.discarded,
            },
        }

    def to_json(self, **extra) -> str:
        payload = self.to_dict()
        payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def csv_header(self) -> list[str]:
        head = ["n"] + (["r"] if self.config.scheme == "type2" else [])
        for name in REPORT_ORDER:
            head += [f"MRE_{name}", f"MSE_{name}", f"Bias_{name}", f"C_{name}"]
        if self.config.scheme in ("type1", "random"):
            head.append("E_p")
        return head

    def csv_row(self) -> list:
        row = [self.config.n] + ([self.config.r] if self.config.scheme == "type2" else [])
        for name in REPORT_ORDER:
            row += [_sig(self.mre[name]), _sig(self.mse[name]), _sig(self.bias[name]), _sig(self.coverage[name])]
        if self.config.scheme in ("type1", "random"):
            row.append(_sig(self.mean_censored))
        return row

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_header())
        writer.writerow(["" if v is None else v for v in self.csv_row()])
        return buf.getvalue()


def aggregate(config: StudyConfig, outcomes, calibration=None) -> SimulationReport:
    """Reduce replicate outcomes (in index order) to a report.

    Raises
    ------
    CalibrationError
        If more than ``config.max_discard`` of the replicates were discarded.
    """
    outcomes = sorted(outcomes, key=lambda o: o.index)
    attempted = len(outcomes)
    kept = [o for o in outcomes if o.converged]
    discarded = attempted - len(kept)
    if attempted == 0:
        raise DomainError("no replicates to aggregate")
    if discarded > config.max_discard * attempted:
        reasons = sorted({o.reason for o in outcomes if not o.converged})
        raise CalibrationError(
            f"{discarded} of {attempted} replicates discarded (limit {config.max_discard:.0%}); "
            f"reasons: {', '.join(reasons)}"
        )
    mean_censored = math.fsum(o.censored_fraction for o in outcomes) / attempted
    truth = {"lambda": config.params.lam, "phi": config.params.phi}
    mre, mse, bias, cov = {}, {}, {}, {}
    for j, name in enumerate(("lambda", "phi")):
        th = truth[name]
        est = [o.estimates[j] for o in kept]
        m = len(est)
        if m == 0:
            mre[name] = mse[name] = bias[name] = cov[name] = math.nan
            continue
        mre[name] = math.fsum(e / th for e in est) / m
        mse[name] = math.fsum((e - th) ** 2 for e in est) / m
        bias[name] = math.fsum(est) / m - th
        cov[name] = sum(o.covered[j] for o in kept) / m
    return SimulationReport(config, mre, mse, bias, cov, mean_censored,
                            attempted, len(kept), discarded, calibration)


def run_study(config: StudyConfig, workers: int | None = None, chunk_size: int | None = None) -> SimulationReport:
    """Run every replicate of ``config`` and aggregate.

    ``workers`` defaults to ``WLSURV_THREADS`` (``1`` if unset, ``0`` for one
    per CPU).  The result is identical for every worker count.
    """
    constant = calibrate(config)
    workers = min(resolve_workers(workers), config.replicates)
    indices = range(config.replicates)
    if workers <= 1:
        outcomes = _run_chunk(config, constant, indices)
    else:
        size = chunk_size or max(1, math.ceil(config.replicates / (4 * workers)))
        chunks = [indices[i:i + size] for i in range(0, config.replicates, size)]
        outcomes = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, [config] * len(chunks), [constant] * len(chunks), chunks):
                outcomes.extend(part)
    return aggregate(config, outcomes, constant)


__all__ = [
    "StudyConfig",
    "SimulationReport",
    "ReplicateOutcome",
    "calibrate_type1",
    "calibrate_random",
    "censored_fraction_uniform",
    "calibrate",
    "replicate_rng",
    "run_replicate",
    "run_study",
    "aggregate",
    "resolve_workers",
    "SCHEMES",
]
