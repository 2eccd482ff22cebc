"""Kaplan-Meier survival estimate and the scaled total-time-on-test (TTT) curve."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .censoring import CensoredSample
from .errors import AllCensoredError, DomainError


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])`` and
    ``initial`` holds before the first breakpoint.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    initial: float

    def __post_init__(self):
        x = np.asarray(self.breakpoints, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise DomainError("breakpoints and values must be 1-d arrays of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", y)
        object.__setattr__(self, "initial", float(self.initial))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], self.initial)
        return float(out) if out.ndim == 0 else out

    def __len__(self):
        return self.breakpoints.size

    def to_csv(self, x_name: str = "time", y_name: str = "value") -> str:
        buf = io.StringIO()
        buf.write(f"{x_name},{y_name}\n")
        for x, y in zip(self.breakpoints, self.values):
            buf.write(f"{x:.10g},{y:.10g}\n")
        return buf.getvalue()


def kaplan_meier(sample: CensoredSample) -> StepFunction:
    """Product-limit survival estimate with steps at the distinct failure times.

    A unit censored at a failure time is still at risk at that time.
    """
    if sample.n == 0:
        raise DomainError("empty sample")
    if sample.d == 0:
        raise AllCensoredError("Kaplan-Meier needs at least one failure")
    times = np.asarray(sample.times)
    status = np.asarray(sample.status)
    fail_times, deaths = np.unique(times[status == 1], return_counts=True)
    sorted_times = np.sort(times)
    at_risk = sorted_times.size - np.searchsorted(sorted_times, fail_times, side="left")
    surv = np.cumprod(1.0 - deaths / at_risk)
    return StepFunction(fail_times, surv, 1.0)


def ttt_curve(times) -> StepFunction:
    """Scaled TTT transform ``G(r/n) = (sum_{i<=r} t_(i) + (n-r) t_(r)) / sum t``.

    Censoring indicators are not used: pass the observed times.  Returned as
    a step function over ``r/n`` with ``G(0) = 0``.
    """
    if isinstance(times, CensoredSample):
        times = times.times
    t = np.sort(np.asarray(times, dtype=float).ravel())
    n = t.size
    if n < 2:
        raise DomainError("the TTT curve needs at least two observations")
    if np.any(t <= 0):
        raise DomainError("times must be positive")
    r = np.arange(1, n + 1)
    total = t.sum()
    g = (np.cumsum(t) + (n - r) * t) / total
    g[-1] = 1.0
    return StepFunction(r / n, g, 0.0)


SHAPES = ("increasing", "decreasing", "bathtub", "inverse-bathtub", "indeterminate")


def _interp_curve(curve: StepFunction, knots):
    u = np.concatenate([[0.0], curve.breakpoints])
    g = np.concatenate([[curve.initial], curve.values])
    return np.interp(knots, u, g)


def _majority(signs, share: float = 2.0 / 3.0) -> int:
    """+1 or -1 when at least ``share`` of the nonzero signs agree, else 0."""
    nz = signs[signs != 0]
    if nz.size == 0:
        return 0
    pos = np.count_nonzero(nz > 0) / nz.size
    if pos >= share:
        return 1
    if 1.0 - pos >= share:
        return -1
    return 0


def shape_hint(curve: StepFunction, dead_zone: float = 0.01, knots: int = 11) -> str:
    """Hazard-shape reading of a TTT curve; advisory only.

    The curve is sampled on ``knots`` equally spaced points of ``[0, 1]``.
    Second differences (zero for the diagonal) give the local curvature and
    values within ``dead_zone`` count as flat.  A two-thirds majority of
    concave signs reads as an increasing hazard and of convex signs as a
    decreasing one.  Convex early and concave late, with the curve dipping
    below the diagonal in the early half and rising above it in the late
    half, reads as a bathtub; the mirror image as an inverse bathtub.
    Anything else is ``"indeterminate"``.
    """
    u = np.linspace(0.0, 1.0, knots)
    g = _interp_curve(curve, u)
    second = g[2:] - 2.0 * g[1:-1] + g[:-2]
    signs = np.where(second > dead_zone, 1, np.where(second < -dead_zone, -1, 0))
    if not np.any(signs):
        return "indeterminate"
    dev = g - u
    half = signs.size // 2
    early, late = _majority(signs[:half]), _majority(signs[signs.size - half:])
    mid = knots // 2
    below_early = np.min(dev[1:mid + 1]) < -dead_zone
    above_early = np.max(dev[1:mid + 1]) > dead_zone
    below_late = np.min(dev[mid:-1]) < -dead_zone
    above_late = np.max(dev[mid:-1]) > dead_zone
    if early > 0 and late < 0 and below_early and above_late:
        return "bathtub"
    if early < 0 and late > 0 and above_early and below_late:
        return "inverse-bathtub"
    overall = _majority(signs)
    if overall < 0 and np.all(dev[1:-1] > -dead_zone):
        return "increasing"
    if overall > 0 and np.all(dev[1:-1] < dead_zone):
        return "decreasing"
    return "indeterminate"


__all__ = ["StepFunction", "kaplan_meier", "ttt_curve", "shape_hint", "SHAPES"]
