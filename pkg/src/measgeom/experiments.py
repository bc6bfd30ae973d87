"""Ensembles of monitored circuits and the analyses built on them.

Every trajectory seed is derived from ``(master seed, experiment id, index)``
and per-trajectory results are merged in index order, so summaries do not
depend on how trajectories were scheduled.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .circuit import CircuitConfig, derive_seed, run_trajectory
from .fitting import LinearFit, fit_linear, fit_nonlinear
from .geometry import (CriticalParams, GeodesicModel, MetricSpec, build_schedule,
                       crossover_separation, predict_interval_entropy,
                       predicted_mutual_information)
from .references import WedgeMap, wedge_map
from .stabilizer import (IntervalEntropyTable, clip_gauge, interval_pair_entropies,
                         tripartite_contiguous)

LN2 = float(np.log(2.0))


# -- ensembles ---------------------------------------------------------------------


def config_fingerprint(config: CircuitConfig) -> str:
    """Hash of everything that defines the circuit ensemble except the seed."""
    sch = config.schedule
    payload = {
        "L": config.L, "T": sch.T, "metric": [sch.metric.variant, sch.metric.rho, sch.metric.l,
                                            sch.metric.r_h],
        "critical": [sch.critical.rho_c, sch.critical.nu],
        "rates": hashlib.sha256(np.ascontiguousarray(sch.rates, "<f8").tobytes()).hexdigest(),
        "initial": config.initial_state, "volume_depth": config.volume_depth,
        "gate_mix": config.gate_mix, "references": config.references,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class EnsembleSummary:
    """Mean and standard error of an observable on a coordinate grid.

    ``stderr`` is the sample standard deviation over ``sqrt(n)``.
    """

    observable: str
    coords: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n: np.ndarray
    fingerprint: str = ""
    coord_name: str = "x"

    @classmethod
    def from_samples(cls, observable: str, coords, samples: dict[int, np.ndarray] | Sequence,
                     fingerprint: str = "", coord_name: str = "x") -> "EnsembleSummary":
        """Reduce per-trajectory vectors, keyed by trajectory index."""
        if isinstance(samples, dict):
            rows = [np.asarray(samples[k], dtype=float) for k in sorted(samples)]
        else:
            rows = [np.asarray(s, dtype=float) for s in samples]
        if len(rows) < 2:
            raise ValueError("need at least two trajectories for a standard error")
        data = np.stack(rows)
        n = data.shape[0]
        mean = data.mean(axis=0)
        err = data.std(axis=0, ddof=1) / np.sqrt(n)
        coords = np.asarray(coords)
        return cls(observable, coords, mean, err, np.full(mean.shape, n), fingerprint, coord_name)

    @classmethod
    def concat(cls, observable: str, coords, parts: Sequence["EnsembleSummary"],
               coord_name: str = "x") -> "EnsembleSummary":
        """Join scalar summaries (one per coordinate) into one curve."""
        return cls(observable, np.asarray(coords),
                   np.array([float(p.mean[0]) for p in parts]),
                   np.array([float(p.stderr[0]) for p in parts]),
                   np.array([int(p.n[0]) for p in parts]),
                   ",".join(sorted({p.fingerprint for p in parts})), coord_name)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"{self.coord_name},mean,stderr,n\n")
            for c, m, e, k in zip(self.coords, self.mean, self.stderr, self.n):
                fh.write(f"{_num(c)},{m:.12g},{e:.12g},{int(k)}\n")

    def to_dict(self) -> dict:
        return {"observable": self.observable, "coord_name": self.coord_name,
                "fingerprint": self.fingerprint, "coords": [float(c) for c in self.coords],
                "mean": [float(m) for m in self.mean], "stderr": [float(e) for e in self.stderr],
                "n": [int(k) for k in self.n]}


def _num(v) -> str:
    f = float(v)
    return str(int(f)) if f.is_integer() else f"{f:.12g}"


class EnsembleError(RuntimeError):
    """One or more trajectories failed; carries the failing seeds."""

    def __init__(self, failures: list[tuple[int, int, str]]):
        self.failures = failures
        seeds = [s for _, s, _ in failures]
        super().__init__(f"{len(failures)} trajectories failed; seeds {seeds}: {failures[0][2]}")


def _run_one(args):
    reducer, config, index = args
    try:
        return index, np.atleast_1d(np.asarray(reducer(config), dtype=float)), None
    except Exception as exc:  # noqa: BLE001 - reported back with the seed
        return index, None, f"{type(exc).__name__}: {exc}"


def run_ensemble(config: CircuitConfig, n: int, reducer: Callable[[CircuitConfig], np.ndarray],
                 master_seed: int = 0, experiment: str = "ensemble", coords=None,
                 observable: str = "value", coord_name: str = "x", threads: int = 1,
                 seeds: Sequence[int] | None = None) -> EnsembleSummary:
    """Run ``n`` seeded trajectories through ``reducer`` and merge by index.

    Args:
        config: template; its seed is replaced per trajectory.
        n: number of trajectories (at least 2).
        reducer: maps a seeded config to a 1-d array of observables.
        master_seed, experiment: inputs of the per-trajectory seed hash.
        coords: coordinates of the reducer's output entries.
        threads: worker processes; results are identical for any value.
        seeds: explicit per-trajectory seeds, overriding the hash.

    Raises:
        EnsembleError: if any reducer call raised.
    """
    if n < 2:
        raise ValueError("an ensemble needs n >= 2")
    if seeds is None:
        seeds = [derive_seed(master_seed, experiment, j) for j in range(n)]
    elif len(seeds) != n:
        raise ValueError("need one seed per trajectory")
    jobs = [(reducer, replace(config, seed=int(s)), j) for j, s in enumerate(seeds)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, n // (4 * threads))))
    else:
        results = [_run_one(job) for job in jobs]
    failures = [(j, int(seeds[j]), err) for j, _, err in results if err is not None]
    if failures:
        raise EnsembleError(failures)
    samples = {j: v for j, v, _ in results}
    if coords is None:
        coords = np.arange(samples[0].size)
    return EnsembleSummary.from_samples(observable, coords, samples, config_fingerprint(config),
                                        coord_name)


# -- reducers (module level so worker processes can pickle them) ---------------------


@dataclass(frozen=True)
class I3TimeAverage:
    """Mean ``I3`` of the first three quarters over layers ``t`` with ``lo < t < hi``.

    ``t`` counts completed layers.
    """

    lo: int
    hi: int

    def __call__(self, config: CircuitConfig) -> np.ndarray:
        q = config.L // 4
        acc = []

        def observe(k, state, _ev):
            if self.lo < k + 1 < self.hi:
                acc.append(tripartite_contiguous(state, 0, q))

        run_trajectory(config, observer=observe, keep_events=False)
        return np.array([np.mean(acc)])


@dataclass(frozen=True)
class FinalProfile:
    """Translation-averaged ``S(|A|)`` for ``|A| = 0..L``, optionally with final ``I3``."""

    with_i3: bool = False

    def __call__(self, config: CircuitConfig) -> np.ndarray:
        st = run_trajectory(config, keep_events=False).state
        clip_gauge(st)
        prof = IntervalEntropyTable(st).profile()
        if not self.with_i3:
            return prof
        return np.append(prof, tripartite_contiguous(st, 0, config.L // 4))


@dataclass(frozen=True)
class PairMutualInformation:
    """Translation-averaged ``I(A:B)`` for two intervals of ``size`` vs separation."""

    size: int
    separations: tuple[int, ...]

    def __call__(self, config: CircuitConfig) -> np.ndarray:
        st = run_trajectory(config, keep_events=False).state
        out = []
        for d in self.separations:
            sa, sb, sab = interval_pair_entropies(st, self.size, d)
            out.append(np.mean(sa + sb - sab))
        return np.array(out)


# -- transition -------------------------------------------------------------------------


@dataclass
class Calibration:
    """``I3(rho)`` curves, one summary per system size."""

    curves: dict[int, EnsembleSummary]

    def crossings(self) -> list[tuple[int, int, float]]:
        """Crossing point of each pair of consecutive sizes."""
        sizes = sorted(self.curves)
        out = []
        for a, b in zip(sizes, sizes[1:]):
            ca, cb = self.curves[a], self.curves[b]
            r = curve_crossing(ca.coords, ca.mean, cb.mean)
            out.append((a, b, r))
        return out

    def rho_c(self) -> float:
        vals = [r for _, _, r in self.crossings() if np.isfinite(r)]
        return float(np.mean(vals)) if vals else float("nan")


def curve_crossing(x, y_small, y_large) -> float:
    """Where the larger system's curve overtakes the smaller one's.

    Uses linear interpolation of the difference; among several upward sign
    changes, the steepest one is taken.
    """
    x = np.asarray(x, float)
    d = np.asarray(y_large, float) - np.asarray(y_small, float)
    best, best_slope = float("nan"), -np.inf
    for i in range(len(x) - 1):
        if d[i] < 0 <= d[i + 1] or d[i] <= 0 < d[i + 1]:
            slope = (d[i + 1] - d[i]) / (x[i + 1] - x[i])
            root = x[i] - d[i] / slope
            if slope > best_slope:
                best, best_slope = float(root), slope
    return best


def calibrate_mipt(L_list: Sequence[int], rho_grid: Sequence[float], samples: int,
                   master_seed: int = 0, gate_mix: float = 0.1, threads: int = 1,
                   critical: CriticalParams = CriticalParams(),
                   progress: Callable[[str], None] | None = None) -> Calibration:
    """Time-averaged ``I3`` of quarters ``A, B, C`` for uniform-rate circuits.

    Each run starts from a product state and lasts ``4L`` layers; ``I3`` is
    averaged over ``2L < t < 4L``.
    """
    curves = {}
    for L in L_list:
        if L % 4:
            raise ValueError(f"L={L} is not divisible by 4")
        parts = []
        for rho in rho_grid:
            sch = build_schedule(MetricSpec.uniform(float(rho)), L, critical, depth=4 * L)
            cfg = CircuitConfig(L, sch, gate_mix=gate_mix)
            parts.append(run_ensemble(cfg, samples, I3TimeAverage(2 * L, 4 * L), master_seed,
                                      f"calibrate/L={L}/rho={float(rho):.6f}", threads=threads,
                                      observable="I3"))
            if progress:
                progress(f"calibrate L={L} rho={rho:.4f} I3={parts[-1].mean[0]:.4f}")
        curves[L] = EnsembleSummary.concat("I3", rho_grid, parts, coord_name="rho")
    return Calibration(curves)


@dataclass
class CollapseResult:
    rho_c_fit: float
    nu_fit: float
    objective: float
    rho_c_ci: tuple[float, float]
    nu_ci: tuple[float, float]
    n_points: int

    def to_dict(self) -> dict:
        return {"rho_c": self.rho_c_fit, "nu": self.nu_fit, "objective": self.objective,
                "rho_c_ci": list(self.rho_c_ci), "nu_ci": list(self.nu_ci),
                "n_points": self.n_points}


def _collapse_points(curves) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rows = []
    for L, c in curves.items():
        if isinstance(c, EnsembleSummary):
            x, y, e = c.coords, c.mean, c.stderr
        else:
            x, y, e = c
        for xi, yi, ei in zip(x, y, e):
            rows.append((float(L), float(xi), float(yi), float(ei)))
    rows.sort()
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


def collapse_objective(params, sizes, rho, y, err=None) -> float:
    """Variance-normalised residual of each point to a master curve of the other sizes.

    Points are placed at ``(rho - rho_c) L^(1/nu)``. For each point, every other
    size whose curve brackets it contributes its two bracketing points; a
    weighted straight line through those gives the master value and its
    variance. The objective is the mean of ``(y - Y)^2 / (dy^2 + dY^2)``, so a
    perfect collapse scores about one. Unbracketed points are skipped and the
    objective is infinite when fewer than half of the points are scored.
    """
    rho_c, nu = float(params[0]), float(params[1])
    if not nu > 0.05:
        return np.inf
    err = np.full(y.size, 1.0) if err is None else np.maximum(err, 1e-9)
    xs = (rho - rho_c) * sizes ** (1.0 / nu)
    var = err ** 2
    acc = np.zeros((5, xs.size))
    for L in np.unique(sizes):
        own = sizes == L
        xj, yj, wj = xs[own], y[own], 1.0 / var[own]
        order = np.argsort(xj, kind="stable")
        xj, yj, wj = xj[order], yj[order], wj[order]
        hi = np.searchsorted(xj, xs, side="left")
        ok = ~own & (hi > 0) & (hi < xj.size)
        hi = np.where(ok, hi, 1)
        for k in (hi - 1, hi):
            dx = np.where(ok, xj[k] - xs, 0.0)
            w = np.where(ok, wj[k], 0.0)
            acc += np.array([w, w * dx, w * dx * dx, w * yj[k], w * dx * yj[k]])
    s0, s1, s2, t0, t1 = acc
    den = s0 * s2 - s1 * s1
    good = den > 1e-12 * np.maximum(s0 * s2, 1e-300)
    if good.sum() < xs.size / 2:
        return np.inf
    pred = (s2[good] * t0[good] - s1[good] * t1[good]) / den[good]
    pvar = s2[good] / den[good]
    return float(np.mean((y[good] - pred) ** 2 / (var[good] + pvar)))


def scaling_collapse(curves, rho_c_grid=None, nu_grid=None, n_bootstrap: int = 100,
                     bootstrap_seed: int = 0) -> CollapseResult:
    """Fit ``(rho_c, nu)`` so that ``y`` collapses against ``(rho - rho_c) L^(1/nu)``.

    Args:
        curves: ``{L: EnsembleSummary}`` or ``{L: (rho, y, stderr)}``; at least
            three sizes.
        rho_c_grid, nu_grid: coarse search grids (defaults span the data range
            and ``nu`` in [0.6, 2.5]).
        n_bootstrap: parametric resamples (``y + stderr * N(0, 1)``) for 95% intervals.
        bootstrap_seed: seed of the resampling generator.
    """
    if len(curves) < 3:
        raise ValueError("scaling collapse needs at least three system sizes")
    sizes, rho, y, err = _collapse_points(curves)
    if rho_c_grid is None:
        rho_c_grid = np.linspace(rho.min(), rho.max(), 41)
    if nu_grid is None:
        nu_grid = np.linspace(0.6, 2.5, 39)
    rho_c_grid, nu_grid = np.asarray(rho_c_grid, float), np.asarray(nu_grid, float)
    if rho_c_grid.size < 2 or nu_grid.size < 2:
        raise ValueError("collapse grids need at least two values per parameter")

    def fit(yv):
        vals = np.array([[collapse_objective((a, b), sizes, rho, yv, err) for b in nu_grid]
                         for a in rho_c_grid])
        if not np.isfinite(vals).any():
            raise ValueError("collapse objective is not finite anywhere on the grid")
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        start = np.array([rho_c_grid[i], nu_grid[j]])
        res = minimize(lambda p: collapse_objective(p, sizes, rho, yv, err), start,
                       method="Nelder-Mead",
                       options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 2000})
        if res.fun <= vals[i, j]:
            return res.x, float(res.fun)
        return start, float(vals[i, j])

    best, obj = fit(y)
    rng = np.random.default_rng(bootstrap_seed)
    boots = []
    for _ in range(n_bootstrap):
        yb = y + err * rng.standard_normal(y.size)
        try:
            boots.append(fit(yb)[0])
        except ValueError:
            continue
    boots = np.array(boots) if boots else np.array([best])
    lo, hi = np.percentile(boots, [2.5, 97.5], axis=0)
    return CollapseResult(float(best[0]), float(best[1]), obj, (float(lo[0]), float(hi[0])),
                          (float(lo[1]), float(hi[1])), int(y.size))


# -- AdS --------------------------------------------------------------------------------


@dataclass
class AdsRuns:
    """Final-state profiles and ``I3`` for each AdS radius."""

    L: int
    l_list: list[float]
    profiles: dict[float, EnsembleSummary]
    i3: dict[float, EnsembleSummary]


def run_ads(L: int, l_list: Sequence[float], samples: int, master_seed: int = 0,
            truncate: bool = False, gate_mix: float = 0.1, threads: int = 1,
            critical: CriticalParams = CriticalParams(),
            progress: Callable[[str], None] | None = None) -> AdsRuns:
    """Simulate AdS schedules (product initial state) and record final-state data."""
    if L % 4:
        raise ValueError("L must be divisible by 4")
    profiles, i3 = {}, {}
    for l in l_list:
        sch = build_schedule(MetricSpec.ads(float(l)), L, critical, truncate_ads=truncate)
        cfg = CircuitConfig(L, sch, gate_mix=gate_mix)
        summ = run_ensemble(cfg, samples, FinalProfile(with_i3=True), master_seed,
                            f"ads/L={L}/l={float(l):g}", threads=threads)
        profiles[l] = EnsembleSummary("S", np.arange(L + 1), summ.mean[:-1], summ.stderr[:-1],
                                      summ.n[:-1], summ.fingerprint, "size")
        i3[l] = EnsembleSummary("I3", np.array([float(l)]), summ.mean[-1:], summ.stderr[-1:],
                                summ.n[-1:], summ.fingerprint, "l")
        if progress:
            progress(f"ads L={L} l={l} S(L/2)={summ.mean[L // 2]:.3f} I3={summ.mean[-1]:.3f}")
    return AdsRuns(L, [float(v) for v in l_list], profiles, i3)


def ads_fit_window(L: int) -> np.ndarray:
    """Sizes ``8 <= |A| <= L/4`` used for the log-law fits."""
    return np.arange(8, L // 4 + 1)


@dataclass
class AdsProfileResult:
    L: int
    l_list: list[float]
    alpha: np.ndarray
    alpha_err: np.ndarray
    offset: np.ndarray
    rel_rms: np.ndarray
    alpha_fit: LinearFit | None
    runs: AdsRuns

    def models(self) -> dict[float, GeodesicModel]:
        return {l: GeodesicModel("ads", alpha=max(a, 0.0), offset=o, cap=False)
                for l, a, o in zip(self.l_list, self.alpha, self.offset)}


def fit_log_law(summary: EnsembleSummary, L: int):
    """Fit ``S = alpha ln|A| + offset`` on the AdS window; returns fit and relative RMS."""
    win = ads_fit_window(L)
    y = summary.mean[win]
    e = summary.stderr[win]
    w = 1.0 / np.maximum(e, 1e-9) ** 2
    lf = fit_linear(np.log(win), y, w)
    pred = lf.slope * np.log(win) + lf.intercept
    rel = float(np.sqrt(np.mean(((pred - y) / y) ** 2)))
    return lf, rel


def ads_profile(L: int, l_list: Sequence[float], samples: int, runs: AdsRuns | None = None,
                **kw) -> AdsProfileResult:
    """Entropy profiles, log-law fits and the linear trend of ``alpha`` in ``l``."""
    runs = runs if runs is not None else run_ads(L, l_list, samples, **kw)
    fits = [fit_log_law(runs.profiles[l], L) for l in l_list]
    alpha = np.array([f.slope for f, _ in fits])
    alpha_err = np.array([f.slope_err for f, _ in fits])
    offset = np.array([f.intercept for f, _ in fits])
    rel = np.array([r for _, r in fits])
    trend = None
    if len(l_list) >= 3:
        trend = fit_linear(np.asarray(l_list, float), alpha, 1.0 / np.maximum(alpha_err, 1e-9) ** 2)
    return AdsProfileResult(L, [float(v) for v in l_list], alpha, alpha_err, offset, rel, trend,
                            runs)


@dataclass
class AdsI3Result:
    l_list: list[float]
    i3: np.ndarray
    i3_err: np.ndarray
    i3_fit: LinearFit
    ratio: float


def ads_i3(L: int, l_list: Sequence[float], samples: int, runs: AdsRuns | None = None,
           alpha_fit: LinearFit | None = None, **kw) -> AdsI3Result:
    """Final-state ``I3`` vs ``l`` with its linear fit and the ratio ``-2 ln2 a / a'``.

    The log-law ansatz predicts ``I3 = -2 ln2 alpha``, so ``a' = -2 ln2 a`` and the
    ratio is 1 for a perfect geometric state.
    """
    runs = runs if runs is not None else run_ads(L, l_list, samples, **kw)
    if alpha_fit is None:
        alpha_fit = ads_profile(L, l_list, samples, runs=runs).alpha_fit
    i3 = np.array([runs.i3[l].mean[0] for l in l_list])
    err = np.array([runs.i3[l].stderr[0] for l in l_list])
    fit = fit_linear(np.asarray(l_list, float), i3, 1.0 / np.maximum(err, 1e-9) ** 2)
    ratio = -2 * LN2 * alpha_fit.slope / fit.slope
    return AdsI3Result([float(v) for v in l_list], i3, err, fit, float(ratio))


# -- BTZ ----------------------------------------------------------------------------------

PLATEAU_THRESHOLD = 0.05


def plateau_detected(profile: np.ndarray, L: int, threshold: float = PLATEAU_THRESHOLD) -> bool:
    """Mean slope over ``[3L/8, L/2)`` below ``threshold`` bits per qubit."""
    a, b = 3 * L // 8, L // 2
    slope = (profile[b] - profile[a]) / (b - a)
    return bool(slope < threshold)


def cusp_detected(profile: np.ndarray, L: int, width: int | None = None,
                  floor: float = 0.01) -> bool:
    """Discrete slope changes sign at ``L/2``: rising before, falling after.

    Slopes are averaged over ``width`` sites (default ``L/32``) on each side;
    magnitudes below ``floor`` bits per qubit count as flat.
    """
    h = L // 2
    w = width or max(1, L // 32)
    left = (profile[h] - profile[h - w]) / w
    right = (profile[h + w] - profile[h]) / w
    return bool(left > floor and right < -floor)


def btz_fit_window(L: int) -> np.ndarray:
    return np.arange(4, L // 2 + 1)


def btz_model_fn(L: int, r_h: float):
    def model(p, sizes):
        s0, ratio = p
        if s0 < 0 or ratio < 1:
            return np.full(np.shape(sizes), np.nan)
        m = GeodesicModel("btz", s0=s0, r=ratio * r_h, r_h=r_h, cap=True)
        return predict_interval_entropy(m, sizes, L)
    return model


@dataclass
class BtzProfileResult:
    L: int
    l: float
    r_h: float
    initial: str
    profile: EnsembleSummary
    model: GeodesicModel
    objective: float
    rel_rms: float
    plateau: bool
    cusp: bool


def fit_btz_profile(summary: EnsembleSummary, L: int, r_h: float, tol: float = 1e-6):
    """Grid plus simplex fit of ``(s0, r)`` to a BTZ entropy profile."""
    win = btz_fit_window(L)
    y = summary.mean[win]
    model = btz_model_fn(L, r_h)
    fit = fit_nonlinear(model, win, y, [np.logspace(-2, 1.5, 36), np.logspace(0, 2, 41)],
                        tol=tol)
    s0, ratio = fit.params
    gm = GeodesicModel("btz", s0=float(s0), r=float(ratio * r_h), r_h=r_h, cap=True)
    pred = predict_interval_entropy(gm, win, L)
    rel = float(np.sqrt(np.mean(((pred - y) / y) ** 2)))
    return gm, fit.objective, rel


def btz_profile(L: int, l: float, r_h: float, initial_kind: str, samples: int,
                master_seed: int = 0, gate_mix: float = 0.1, threads: int = 1,
                critical: CriticalParams = CriticalParams(),
                T: int | None = None) -> BtzProfileResult:
    """Averaged ``S(|A|)`` for a BTZ schedule, the capped geodesic fit and shape flags."""
    sch = build_schedule(MetricSpec.btz(l, r_h), L, critical, depth=T)
    cfg = CircuitConfig(L, sch, initial_state=initial_kind, gate_mix=gate_mix)
    summ = run_ensemble(cfg, samples, FinalProfile(), master_seed,
                        f"btz/L={L}/l={l:g}/rh={r_h:g}/{initial_kind}", threads=threads,
                        observable="S", coord_name="size")
    gm, obj, rel = fit_btz_profile(summ, L, r_h)
    return BtzProfileResult(L, l, r_h, initial_kind, summ, gm, obj, rel,
                            plateau_detected(summ.mean, L), cusp_detected(summ.mean, L))


@dataclass
class MutualInfoResult:
    size: int
    separations: np.ndarray
    measured: EnsembleSummary
    predicted: np.ndarray
    model_crossover: float
    measured_crossover: float


def level_crossing(x, y, level: float = 1.0) -> float:
    """First downward crossing of ``level`` by linear interpolation."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    for i in range(len(x) - 1):
        if y[i] >= level > y[i + 1]:
            return float(x[i] + (y[i] - level) * (x[i + 1] - x[i]) / (y[i] - y[i + 1]))
    return float("nan")


def btz_mutual_info(L: int, l: float, r_h: float, model: GeodesicModel, separations,
                    samples: int, size: int | None = None, master_seed: int = 0,
                    gate_mix: float = 0.1, threads: int = 1,
                    critical: CriticalParams = CriticalParams(),
                    T: int | None = None) -> MutualInfoResult:
    """Measured ``I(A:B)`` vs separation against the parameter-free two-saddle model.

    The model crossover is the separation where the saddles are degenerate;
    there the predicted ``I`` is exactly 1 bit, so the measured crossover is
    where the measured mean falls through 1 bit.
    """
    size = L // 8 if size is None else int(size)
    seps = tuple(int(d) for d in separations)
    sch = build_schedule(MetricSpec.btz(l, r_h), L, critical, depth=T)
    cfg = CircuitConfig(L, sch, initial_state="volume", gate_mix=gate_mix)
    summ = run_ensemble(cfg, samples, PairMutualInformation(size, seps), master_seed,
                        f"mi/L={L}/l={l:g}/rh={r_h:g}/A={size}", coords=np.array(seps),
                        threads=threads, observable="I", coord_name="separation")
    pred = predicted_mutual_information(model, size, seps, L)
    try:
        model_x = crossover_separation(model, size, L)
    except ValueError:
        model_x = float("nan")
    return MutualInfoResult(size, np.array(seps), summ, pred, model_x,
                            level_crossing(seps, summ.mean, 1.0))


# -- wedge ------------------------------------------------------------------------------


def wedge_experiment(L: int, l: float, r_h: float, size: int, separations, samples: int,
                     master_seed: int = 0, gate_mix: float = 0.1,
                     critical: CriticalParams = CriticalParams(),
                     T: int | None = None) -> WedgeMap:
    """Reference-qubit image of the entanglement wedge of two intervals on a BTZ schedule."""
    sch = build_schedule(MetricSpec.btz(l, r_h), L, critical, depth=T)
    cfg = CircuitConfig(L, sch, initial_state="volume", gate_mix=gate_mix, references=True)
    return wedge_map(cfg, size, separations, samples, master_seed=master_seed,
                     experiment=f"wedge/L={L}/l={l:g}/rh={r_h:g}/A={size}")
