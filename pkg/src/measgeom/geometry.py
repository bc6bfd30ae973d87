"""Target geometries as measurement-rate schedules, and geodesic entropy models.

A metric ``ds^2 = s(t)^2 (dx^2 + dt^2)`` is realised by a brickwork circuit with
single-site measurement probability ``rho = rho_c - s^(1/nu)`` (clamped at 0).
Time runs over ``[-T, 0)``; layer ``k`` sits at the midpoint ``t_k = -T + k + 1/2``.
Entropies are in bits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class CriticalParams:
    """Location and correlation-length exponent of the measurement transition."""

    rho_c: float = 0.2050
    nu: float = 1.30

    def __post_init__(self):
        if not 0 < self.rho_c < 1:
            raise ValueError(f"rho_c must lie in (0, 1), got {self.rho_c}")
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")


@dataclass(frozen=True)
class MetricSpec:
    """Target metric.

    Attributes:
        variant: ``"uniform"``, ``"ads"`` or ``"btz"``.
        rho: constant rate for the uniform variant.
        l: AdS radius in lattice units.
        r_h: horizon radius (BTZ only).
    """

    variant: Literal["uniform", "ads", "btz"]
    rho: float | None = None
    l: float | None = None
    r_h: float | None = None

    def __post_init__(self):
        v = self.variant
        if v == "uniform":
            if self.rho is None or not 0 <= self.rho <= 1:
                raise ValueError("uniform metric needs 0 <= rho <= 1")
        elif v == "ads":
            # l = 0 is the uniform-critical limit
            if self.l is None or self.l < 0:
                raise ValueError("AdS metric needs l >= 0")
        elif v == "btz":
            if self.l is None or self.l <= 0 or self.r_h is None or self.r_h <= 0:
                raise ValueError("BTZ metric needs l > 0 and r_h > 0")
        else:
            raise ValueError(f"unknown metric variant {v!r}")

    @classmethod
    def uniform(cls, rho: float) -> "MetricSpec":
        return cls("uniform", rho=float(rho))

    @classmethod
    def ads(cls, l: float) -> "MetricSpec":
        return cls("ads", l=float(l))

    @classmethod
    def btz(cls, l: float, r_h: float) -> "MetricSpec":
        return cls("btz", l=float(l), r_h=float(r_h))


# -- rates ---------------------------------------------------------------------


def rho_ads(t, l: float, critical: CriticalParams = CriticalParams()):
    """Regularised AdS rate ``rho_c * (1 - (l / (l + |t|))**(1/nu))`` for ``t <= 0``.

    ``l = 0`` returns ``rho_c`` for every ``t != 0``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t > 0):
        raise ValueError("rho_ads is defined for t <= 0")
    if l < 0:
        raise ValueError("l must be non-negative")
    at = np.abs(t)
    if l == 0:
        out = np.where(at > 0, critical.rho_c, 0.0)
    else:
        out = critical.rho_c * (1.0 - (l / (l + at)) ** (1.0 / critical.nu))
    return out[()] if out.ndim == 0 else out


def btz_depth(L: int, l: float, r_h: float) -> int:
    """Circuit depth ``T = L l / (4 r_h)`` rounded to the nearest layer."""
    if L <= 0 or l <= 0 or r_h <= 0:
        raise ValueError("L, l and r_h must be positive")
    T = int(np.rint(L * l / (4.0 * r_h)))
    if T < 1:
        raise ValueError(f"BTZ depth rounds to {T} layers; need at least 1")
    return T


def btz_time_of_radius(r, T: float, r_h: float):
    """Circuit time ``t(r) = -T (1 - (2/pi) arctan sqrt((r/r_h)^2 - 1))``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < r_h):
        raise ValueError("radius must satisfy r >= r_h")
    out = -T * (1.0 - (2.0 / np.pi) * np.arctan(np.sqrt((r / r_h) ** 2 - 1.0)))
    return out[()] if out.ndim == 0 else out


def btz_radius_of_time(t, T: float, r_h: float):
    """Radius ``r(t) = r_h csc(pi |t| / 2T)`` on ``-T <= t < 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < -T) or np.any(t >= 0):
        raise ValueError("t must lie in [-T, 0)")
    out = r_h / np.sin(np.pi * np.abs(t) / (2.0 * T))
    return out[()] if out.ndim == 0 else out


def entropy_density_btz(t, l: float, T: float):
    """Entropy per unit length ``(pi l / 2T) csc(pi |t| / 2T)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < -T) or np.any(t >= 0):
        raise ValueError("t must lie in [-T, 0)")
    out = (np.pi * l / (2.0 * T)) / np.sin(np.pi * np.abs(t) / (2.0 * T))
    return out[()] if out.ndim == 0 else out


def rho_from_density(s, critical: CriticalParams = CriticalParams()):
    """Measurement rate ``max(0, rho_c - s^(1/nu))`` for entropy density ``s``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("entropy density must be non-negative")
    out = np.maximum(0.0, critical.rho_c - s ** (1.0 / critical.nu))
    return out[()] if out.ndim == 0 else out


# -- schedules -------------------------------------------------------------------


def layer_times(T: int) -> np.ndarray:
    """Midpoint time of each layer, ``-T + k + 1/2``."""
    return -T + np.arange(T) + 0.5


@dataclass
class MeasurementSchedule:
    """Per-layer, per-site measurement probabilities on a ``T x L`` grid.

    Attributes:
        L: number of system sites.
        T: number of layers.
        rates: array of shape ``(T, L)``.
        metric: the metric this schedule realises.
        critical: transition parameters used to build it.
    """

    L: int
    T: int
    rates: np.ndarray
    metric: MetricSpec
    critical: CriticalParams = field(default_factory=CriticalParams)

    def __post_init__(self):
        self.rates = np.asarray(self.rates, dtype=float)
        if self.rates.shape != (self.T, self.L):
            raise ValueError(f"rates has shape {self.rates.shape}, expected {(self.T, self.L)}")
        if np.any(self.rates < 0) or np.any(self.rates > 1):
            raise ValueError("rates must lie in [0, 1]")

    @property
    def times(self) -> np.ndarray:
        return layer_times(self.T)

    def rate(self, x: int, k: int) -> float:
        return float(self.rates[k, x % self.L])

    def layer_rates(self, k: int) -> np.ndarray:
        return self.rates[k]

    def to_csv(self, path) -> None:
        """Write ``t_layer, x_site, rho`` rows, one per grid point."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_layer", "x_site", "rho"])
            for k in range(self.T):
                for x in range(self.L):
                    w.writerow([k, x, f"{self.rates[k, x]:.12g}"])

    @staticmethod
    def read_csv(path) -> np.ndarray:
        """Load a rate grid previously written by :meth:`to_csv`."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        T = int(data[:, 0].max()) + 1
        L = int(data[:, 1].max()) + 1
        grid = np.zeros((T, L))
        grid[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2]
        return grid


def build_schedule(metric: MetricSpec, L: int, critical: CriticalParams = CriticalParams(),
                   depth: int | None = None, truncate_ads: bool = False) -> MeasurementSchedule:
    """Discretise a metric into a rate schedule.

    Args:
        metric: target metric.
        L: system size.
        critical: transition parameters.
        depth: layer count; required for uniform metrics, defaults to ``4L``
            for AdS (``2L`` when ``truncate_ads``) and to :func:`btz_depth` for BTZ.
        truncate_ads: start AdS runs at ``-2L`` instead of ``-4L``.

    Returns:
        The schedule, with rates sampled at layer midpoints.
    """
    if L < 2:
        raise ValueError(f"L must be at least 2, got {L}")
    if metric.variant == "uniform":
        if depth is None:
            raise ValueError("uniform schedules need an explicit depth")
        T = int(depth)
        if T < 0:
            raise ValueError("depth must be non-negative")
        col = np.full(T, metric.rho)
    elif metric.variant == "ads":
        T = int(depth) if depth is not None else (2 if truncate_ads else 4) * L
        if T < 0:
            raise ValueError("depth must be non-negative")
        col = rho_ads(layer_times(T), metric.l, critical) if T else np.zeros(0)
    else:
        T = btz_depth(L, metric.l, metric.r_h) if depth is None else int(depth)
        if T < 1:
            raise ValueError("BTZ depth must be at least one layer")
        col = rho_from_density(entropy_density_btz(layer_times(T), metric.l, T), critical)
    rates = np.repeat(np.asarray(col, float)[:, None], L, axis=1)
    return MeasurementSchedule(L, T, np.clip(rates, 0.0, 1.0), metric, critical)


# -- geodesic models ----------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicModel:
    """Analytic interval-entropy model.

    Attributes:
        variant: ``"ads"`` for ``alpha * ln|A| + offset`` or ``"btz"`` for
            ``s0 * d(0, 2 pi |A| / L)``.
        alpha, offset: AdS log-law parameters.
        s0: BTZ entropy per unit geodesic length.
        r: effective boundary radius of the final state (BTZ).
        r_h: horizon radius (BTZ).
        cap: clip predictions at the qubit count ``|A|``.
    """

    variant: Literal["ads", "btz"]
    alpha: float = 0.0
    offset: float = 0.0
    s0: float = 0.0
    r: float = 1.0
    r_h: float = 1.0
    cap: bool = True

    def __post_init__(self):
        if self.variant == "ads":
            if self.alpha < 0:
                raise ValueError("alpha must be non-negative")
        elif self.variant == "btz":
            if self.s0 < 0:
                raise ValueError("s0 must be non-negative")
            if not self.r_h > 0:
                raise ValueError("r_h must be positive")
            if self.r < self.r_h:
                raise ValueError("boundary radius must satisfy r >= r_h")
        else:
            raise ValueError(f"unknown model variant {self.variant!r}")


def _reduce_angle(dphi):
    """Map to ``(-pi, pi]``."""
    d = np.mod(np.asarray(dphi, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(d == -np.pi, np.pi, d)


def geodesic_distance_btz(phi1, phi2, model: GeodesicModel):
    """Boundary-to-boundary geodesic length at radius ``r`` outside a BTZ horizon.

    Winding numbers ``n in {-1, 0, 1}`` suffice once the angle difference is
    reduced to ``(-pi, pi]``.
    """
    if model.variant != "btz":
        raise ValueError("geodesic_distance_btz needs a BTZ model")
    if model.r < model.r_h:
        raise ValueError("boundary radius must satisfy r >= r_h")
    d = _reduce_angle(np.asarray(phi1, float) - np.asarray(phi2, float))
    ratio2 = (model.r / model.r_h) ** 2
    best = None
    for n in (-1, 0, 1):
        # cosh(x) - 1 = 2 sinh(x/2)^2 keeps precision near zero
        arg = 1.0 + ratio2 * 2.0 * np.sinh(model.r_h * (d + 2 * np.pi * n) / 2.0) ** 2
        val = np.arccosh(arg)
        best = val if best is None else np.minimum(best, val)
    return best[()] if np.ndim(best) == 0 else best


def predict_interval_entropy(model: GeodesicModel, size, L: int):
    """Predicted entropy (bits) of a contiguous interval of ``size`` qubits.

    Sizes may be non-integer (useful for root finding).  Predictions are
    symmetric under ``size -> L - size`` and vanish at 0 and ``L``.
    """
    a = np.asarray(size, dtype=float)
    if np.any(a < 0) or np.any(a > L):
        raise ValueError("interval size must lie in [0, L]")
    m = np.minimum(a, L - a)
    if model.variant == "ads":
        val = model.alpha * np.log(np.maximum(m, 1.0)) + model.offset
        # linear ramp from 0 to the one-site value below |A| = 1
        val = np.where(m >= 1, val, m * model.offset)
    else:
        val = model.s0 * geodesic_distance_btz(0.0, 2 * np.pi * m / L, model)
    if model.cap:
        val = np.minimum(val, m)
    val = np.where(m <= 0, 0.0, np.maximum(val, 0.0))
    return val[()] if val.ndim == 0 else val


def soft_min_bits(s1, s2):
    """``-log2(2^-s1 + 2^-s2)``, evaluated stably."""
    s1 = np.asarray(s1, float)
    s2 = np.asarray(s2, float)
    lo = np.minimum(s1, s2)
    out = lo - np.log2(1.0 + np.exp2(-np.abs(s1 - s2)))
    return out[()] if out.ndim == 0 else out


def saddle_entropies(model: GeodesicModel, size_a: float, size_b: float, separation: float,
                     L: int) -> tuple[float, float]:
    """Disconnected and connected saddle values ``(S1, S2)`` for two intervals.

    ``S1 = S(A) + S(B)``; ``S2 = S(C) + S(A C B)`` where ``C`` is the gap of
    ``separation`` sites between them.
    """
    if size_a < 0 or size_b < 0 or separation < 0 or size_a + size_b + separation > L:
        raise ValueError("intervals do not fit on the chain")
    s1 = predict_interval_entropy(model, size_a, L) + predict_interval_entropy(model, size_b, L)
    s2 = (predict_interval_entropy(model, separation, L)
          + predict_interval_entropy(model, size_a + size_b + separation, L))
    return float(s1), float(s2)


def _as_interval(iv, L):
    start, length = iv
    return int(start) % L, int(length)


def joint_entropy_two_intervals(model: GeodesicModel, A, B, L: int) -> float:
    """Two-saddle estimate of ``S(A u B)`` for disjoint intervals ``(start, length)``."""
    (a0, la), (b0, lb) = _as_interval(A, L), _as_interval(B, L)
    sa = set((a0 + k) % L for k in range(la))
    sb = set((b0 + k) % L for k in range(lb))
    if sa & sb:
        raise ValueError("intervals overlap")
    # shortest gap between the two intervals on the ring
    gap1 = (b0 - (a0 + la)) % L
    gap2 = (a0 - (b0 + lb)) % L
    sep = min(gap1, gap2)
    s1, s2 = saddle_entropies(model, la, lb, sep, L)
    return float(soft_min_bits(s1, s2))


def predicted_mutual_information(model: GeodesicModel, size: float, separations, L: int):
    """``I(A:B)`` for two equal intervals vs separation, from the two-saddle formula."""
    seps = np.atleast_1d(np.asarray(separations, float))
    sa = predict_interval_entropy(model, size, L)
    out = np.empty(seps.size)
    for k, d in enumerate(seps):
        s1, s2 = saddle_entropies(model, size, size, d, L)
        out[k] = 2 * sa - soft_min_bits(s1, s2)
    return out


def crossover_separation(model: GeodesicModel, size: float, L: int) -> float:
    """Separation at which the two saddles are degenerate, ``S1 = S2``, by bisection."""
    f = lambda d: np.subtract(*saddle_entropies(model, size, size, d, L))  # noqa: E731
    # beyond half the free space the other gap becomes the shorter one
    hi = (L - 2 * size) / 2.0
    lo = 0.0
    if f(lo) * f(hi) > 0:
        raise ValueError("no saddle crossover for these intervals")
    return float(brentq(f, lo, hi, xtol=1e-12))
