import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measgeom.experiments import btz_model_fn
from measgeom.fitting import FitFailure, SingularFitError, fit_linear, fit_nonlinear


def test_exact_line():
    xs = np.arange(10.0)
    f = fit_linear(xs, 2 * xs + 1)
    assert abs(f.slope - 2) < 1e-12 and abs(f.intercept - 1) < 1e-12
    assert f.r_squared == pytest.approx(1.0)


def test_repeated_x_is_singular():
    with pytest.raises(SingularFitError):
        fit_linear([3.0, 3.0, 3.0], [1.0, 2.0, 3.0])


def test_input_validation():
    with pytest.raises(ValueError):
        fit_linear([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_linear([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], weights=[1.0, -1.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.integers(3, 30))
def test_noiseless_lines_are_exact(a, b, n):
    xs = np.linspace(-3, 7, n)
    f = fit_linear(xs, a * xs + b, weights=np.linspace(1, 2, n))
    assert f.slope == pytest.approx(a, abs=1e-9) and f.intercept == pytest.approx(b, abs=1e-9)


def test_one_sigma_coverage():
    rng = np.random.default_rng(0)
    xs = np.linspace(0, 1, 12)
    sigma = 0.3
    hits = 0
    n = 1000
    for _ in range(n):
        ys = 1.5 * xs - 0.2 + sigma * rng.standard_normal(xs.size)
        f = fit_linear(xs, ys, weights=np.full(xs.size, sigma**-2))
        hits += abs(f.slope - 1.5) < f.slope_err
    assert abs(hits / n - 0.683) < 0.05


def test_btz_closure():
    L, r_h = 256, 0.5
    sizes = np.arange(4, L // 2 + 1)
    model = btz_model_fn(L, r_h)
    truth = np.array([1.7, 9.0])
    ys = model(truth, sizes)
    fit = fit_nonlinear(model, sizes, ys, [np.logspace(-1, 1, 15), np.logspace(0, 2, 15)],
                        tol=1e-12)
    assert np.all(np.abs(fit.params / truth - 1) < 0.01)


def test_cap_saturation():
    L, r_h = 64, 0.5
    sizes = np.arange(1, L // 2 + 1)
    model = btz_model_fn(L, r_h)
    fit = fit_nonlinear(model, sizes, sizes.astype(float), [[50.0, 100.0], [2.0, 5.0]])
    assert fit.objective == 0.0
    assert np.array_equal(model(fit.params, sizes), sizes)


def test_tighter_tolerance_never_worse():
    rng = np.random.default_rng(3)
    xs = np.linspace(0, 4, 40)
    ys = 2.5 * np.exp(-0.7 * xs) + 0.01 * rng.standard_normal(xs.size)
    model = lambda p, x: p[0] * np.exp(-p[1] * x)  # noqa: E731
    grid = [[1.0, 2.0, 3.0], [0.1, 0.5, 1.0]]
    loose = fit_nonlinear(model, xs, ys, grid, tol=1e-3)
    tight = fit_nonlinear(model, xs, ys, grid, tol=1e-4)
    assert tight.objective <= loose.objective


def test_no_finite_grid_point():
    model = lambda p, x: np.full_like(x, np.nan)  # noqa: E731
    with pytest.raises(FitFailure):
        fit_nonlinear(model, [1.0, 2.0], [1.0, 2.0], [[1.0, 2.0]])


def test_nonfinite_data_rejected():
    with pytest.raises(ValueError):
        fit_nonlinear(lambda p, x: x, [1.0, np.nan], [1.0, 2.0], [[1.0]])
