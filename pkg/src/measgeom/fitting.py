"""Deterministic least-squares fits shared by the experiments."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize


class SingularFitError(ValueError):
    """The design matrix is rank deficient."""


class FitFailure(RuntimeError):
    """No finite objective was found."""


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    covariance: np.ndarray
    r_squared: float

    @property
    def slope_err(self) -> float:
        return float(np.sqrt(self.covariance[0, 0]))

    @property
    def intercept_err(self) -> float:
        return float(np.sqrt(self.covariance[1, 1]))


def fit_linear(xs, ys, weights=None) -> LinearFit:
    """Weighted least squares line ``y = slope * x + intercept``.

    Args:
        xs, ys: at least three points.
        weights: positive weights, normally ``1 / sigma**2``; the covariance is
            then the absolute-sigma parameter covariance.  Unit weights when omitted.

    Returns:
        Slope, intercept, their ``2 x 2`` covariance and the weighted ``R^2``.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    if x.shape != y.shape or x.shape != w.shape or x.ndim != 1:
        raise ValueError("xs, ys and weights must be 1-d arrays of equal length")
    if x.size < 3:
        raise ValueError("need at least three points")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be positive and finite")
    xm = np.sum(w * x) / np.sum(w)
    sxx = np.sum(w * (x - xm) ** 2)
    if sxx <= 1e-14 * max(1.0, np.sum(w * x * x)):
        raise SingularFitError("xs have zero variance; the line is undetermined")
    a = np.stack([x, np.ones_like(x)], axis=1)
    ata = a.T @ (w[:, None] * a)
    cov = np.linalg.inv(ata)
    slope, intercept = cov @ (a.T @ (w * y))
    resid = y - (slope * x + intercept)
    ym = np.sum(w * y) / np.sum(w)
    sst = np.sum(w * (y - ym) ** 2)
    r2 = 1.0 - np.sum(w * resid**2) / sst if sst > 0 else 1.0
    return LinearFit(float(slope), float(intercept), cov, float(r2))


@dataclass(frozen=True)
class NonlinearFit:
    params: np.ndarray
    objective: float
    grid_best: np.ndarray
    iterations: int


def fit_nonlinear(model: Callable[[np.ndarray, np.ndarray], np.ndarray], xs, ys,
                  init_grid: Sequence[Sequence[float]], weights=None, tol: float = 1e-6,
                  max_iter: int = 20000) -> NonlinearFit:
    """Grid-seeded Nelder-Mead minimisation of weighted squared residuals.

    Args:
        model: ``model(params, xs) -> predictions``; may return non-finite
            values for invalid parameters, which count as an infinite objective.
        xs, ys: data.
        init_grid: one sequence of candidate values per parameter; every
            combination is evaluated and the best seeds the simplex.
        weights: per-point weights (unit when omitted).
        tol: stop when the objective improves by less than this between simplex
            iterations.
        max_iter: iteration cap for the simplex stage.

    Raises:
        FitFailure: every grid point gives a non-finite objective.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data must be finite")

    def objective(p):
        try:
            pred = np.asarray(model(np.asarray(p, dtype=float), x), dtype=float)
        except (ValueError, FloatingPointError, ZeroDivisionError):
            return np.inf
        val = float(np.sum(w * (pred - y) ** 2))
        return val if np.isfinite(val) else np.inf

    best, best_val = None, np.inf
    for combo in itertools.product(*init_grid):
        v = objective(combo)
        if v < best_val:
            best, best_val = np.asarray(combo, dtype=float), v
    if best is None:
        raise FitFailure("no finite objective on the initial grid")
    res = minimize(objective, best, method="Nelder-Mead",
                   options={"fatol": tol, "xatol": 1e-12, "maxiter": max_iter,
                            "maxfev": 4 * max_iter})
    params, val = (res.x, float(res.fun)) if res.fun <= best_val else (best, best_val)
    return NonlinearFit(np.asarray(params, dtype=float), val, best, int(res.nit))
