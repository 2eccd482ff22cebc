"""Quasi-Newton maximization with an Armijo backtracking line search."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryDriftError, EvaluationError, QuadratureError


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    nfev: int
    converged: bool
    message: str


def bfgs_maximize(
    fun,
    x0,
    *,
    gtol: float = 1e-6,
    xtol: float = 1e-10,
    max_iter: int = 500,
    max_step: float = 2.0,
    lower: float = -math.inf,
    upper: float = math.inf,
) -> OptimResult:
    """Maximize ``fun`` where ``fun(x)`` returns ``(value, gradient)``.

    Converged means the gradient infinity-norm fell below ``gtol``.  A step
    shorter than ``xtol`` ends the run early.  Points where ``fun`` raises
    :class:`EvaluationError` count as rejected trial steps.  An accepted
    iterate outside ``[lower, upper]`` (any coordinate) raises
    :class:`BoundaryDriftError`.
    """
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    nfev = 1
    dim = x.size
    H = np.eye(dim)
    fresh = True
    c1 = 1e-4

    for it in range(1, max_iter + 1):
        gnorm = np.max(np.abs(g))
        if gnorm < gtol:
            return OptimResult(x, f, g, it - 1, nfev, True, "gradient tolerance reached")

        p = H @ g
        if g @ p <= 0:
            H = np.eye(dim)
            fresh = True
            p = g.copy()
        pnorm = np.linalg.norm(p)
        if pnorm > max_step:
            p *= max_step / pnorm

        slope = g @ p
        alpha = 1.0
        accepted = False
        noise = 1e-12 * max(1.0, abs(f))
        for _ in range(60):
            trial = x + alpha * p
            try:
                f_new, g_new = fun(trial)
                nfev += 1
            except (EvaluationError, QuadratureError, FloatingPointError, OverflowError):
                nfev += 1
                alpha *= 0.5
                continue
            if f_new >= f + c1 * alpha * slope:
                accepted = True
                break
            # near the optimum the decrease drowns in rounding; accept if the gradient shrinks
            if f_new >= f - noise and np.max(np.abs(g_new)) < gnorm:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if not fresh:
                H = np.eye(dim)
                fresh = True
                continue
            return OptimResult(x, f, g, it, nfev, False, "line search failed")

        s = trial - x
        if np.any(trial < lower) or np.any(trial > upper):
            raise BoundaryDriftError(f"iterate {trial} left the admissible box")
        y = g - g_new  # gradient change of the minimized objective -f
        sy = s @ y
        x, f, g = trial, f_new, g_new
        if np.linalg.norm(s) < xtol:
            ok = np.max(np.abs(g)) < gtol
            return OptimResult(x, f, g, it, nfev, ok, "step tolerance reached")
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if fresh:
                H = np.eye(dim) * (sy / (y @ y))
                fresh = False
            rho = 1.0 / sy
            V = np.eye(dim) - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)

    ok = np.max(np.abs(g)) < gtol
    return OptimResult(x, f, g, max_iter, nfev, ok, "iteration limit reached")


__all__ = ["OptimResult", "bfgs_maximize"]
