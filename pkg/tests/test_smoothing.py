import numpy as np
import pytest

from artifact import tsmodels as T
from artifact.errors import InsufficientDataError, ParameterError
from artifact.tsmodels.smoothing import hw_initial_state, ses_one_step


def ses_oracle(y, alpha):
    f = [y[0]]
    for v in y:
        f.append(alpha * v + (1 - alpha) * f[-1])
    return np.array(f)


def seasonal_series(n, m, kind, level=50.0, slope=0.4):
    t = np.arange(1, n + 1)
    pattern = np.array([3.0, -1.0, -4.0, 2.0, 0.0][:m])
    pattern -= pattern.mean()
    if kind == "additive":
        return level + slope * t + pattern[(t - 1) % m]
    factors = 1 + pattern / 20
    return (level + slope * t) * factors[(t - 1) % m]


def test_default_grid():
    assert len(T.DEFAULT_GRID) == 20
    assert T.DEFAULT_GRID[0] == 0.01 and T.DEFAULT_GRID[-1] == pytest.approx(0.96)


def test_ses_one_step_matches_recursion():
    y = np.random.default_rng(3).normal(size=30)
    assert np.allclose(ses_one_step(y, 0.3), ses_oracle(y, 0.3), atol=1e-12)


def test_ses_fit_prefers_smallest_alpha_on_ties():
    model = T.ses_fit(np.full(20, 4.0))
    assert model.alpha == 0.01
    assert model.mse == 0.0
    assert T.ses_forecast(model, 3).tolist() == [4.0, 4.0, 4.0]


def test_ses_fit_is_grid_optimal():
    y = np.cumsum(np.random.default_rng(5).normal(size=200))
    model = T.ses_fit(y)
    for a in T.DEFAULT_GRID:
        f = ses_oracle(y, a)
        assert model.mse <= np.mean((y[1:] - f[1:-1]) ** 2) + 1e-12
    assert model.last_forecast == pytest.approx(ses_oracle(y, model.alpha)[-1])


def test_ses_needs_two_points():
    with pytest.raises(ParameterError):
        T.ses_fit([1.0])


def test_holt_linear_series_is_exact():
    y = 2 + 3 * np.arange(1, 51, dtype=float)
    model = T.holt_fit(y)
    assert model.mse < 1e-18
    assert np.allclose(T.holt_forecast(model, 4), 2 + 3 * (50 + np.arange(1, 5)), atol=1e-9)


def test_holt_accepts_dict_grid():
    y = np.sin(np.arange(40) / 3) + np.arange(40) * 0.1
    model = T.holt_fit(y, {"alpha": [0.2, 0.5], "beta": [0.1]})
    assert model.alpha in (0.2, 0.5) and model.beta == 0.1


def test_holt_too_short():
    with pytest.raises(InsufficientDataError):
        T.holt_fit([1.0, 2.0])


def test_seasonal_index():
    n, m = 20, 4
    assert T.seasonal_index(n, 1, m) == n - 3
    assert T.seasonal_index(n, 4, m) == n
    assert T.seasonal_index(n, 5, m) == n - 3  # k = 1
    assert T.seasonal_index(n, 9, m) == n - 3  # k = 2


@pytest.mark.parametrize("kind", ["additive", "multiplicative"])
def test_initial_state_exact_on_clean_series(kind):
    y = seasonal_series(24, 4, kind)
    level, trend, seasonal = hw_initial_state(y, 4, kind)
    assert trend == pytest.approx(0.4, abs=1e-10)
    assert level == pytest.approx(50.0, abs=1e-9)


@pytest.mark.parametrize("kind", ["additive", "multiplicative"])
@pytest.mark.parametrize("m", [4, 5])
def test_hw_recovers_clean_series(kind, m):
    full = seasonal_series(48 + 8, m, kind)
    model = T.hw_fit(full[:48], m, kind)
    assert np.allclose(T.hw_forecast(model, 8), full[48:], atol=1e-6)


def test_hw_multiplicative_rejects_non_positive():
    y = seasonal_series(24, 4, "additive") - 100
    with pytest.raises(ParameterError):
        T.hw_fit(y, 4, "multiplicative")


def test_hw_two_seasons_is_enough():
    y = seasonal_series(8, 4, "additive")
    assert T.hw_fit(y, 4).n_obs == 8


def test_hw_too_short():
    with pytest.raises(InsufficientDataError):
        T.hw_fit(np.arange(1.0, 8.0), 4)


def test_forecast_horizon_validation():
    model = T.ses_fit([1.0, 2.0, 3.0])
    with pytest.raises(ParameterError):
        T.ses_forecast(model, 0)


@pytest.mark.parametrize(
    "model",
    [
        T.ses_fit(np.arange(1.0, 30.0)),
        T.holt_fit(np.arange(1.0, 30.0) ** 1.1),
        T.hw_fit(seasonal_series(30, 5, "multiplicative"), 5, "multiplicative"),
    ],
)
def test_model_json_round_trip(model):
    assert T.loads(T.dumps(model)) == model


def test_ses_hand_recursion():
    f = ses_one_step([10.0, 12.0, 11.0], 0.5)
    assert f[1:].tolist() == [10.0, 11.0, 11.0]


@pytest.mark.parametrize("alpha, expected", [(1.0, 11.0), (0.0, 10.0)])
def test_ses_alpha_limits(alpha, expected):
    model = T.ses_fit([10.0, 12.0, 11.0], alpha_grid=[alpha])
    assert T.ses_forecast(model, 2).tolist() == [expected, expected]


def test_holt_constant_and_noisy_line():
    flat = T.holt_fit(np.full(30, 5.0))
    assert flat.trend == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(T.holt_forecast(flat, 3), 5.0)
    t = np.arange(1, 501)
    y = 3 * t + np.random.default_rng(11).normal(0, 5, 500)
    assert abs(T.holt_fit(y).trend - 3) < 0.5


def test_hw_reference_generators():
    t = np.arange(1, 49)
    s = np.array([1.0, -1.0, 2.0, -2.0])
    f = np.array([1.1, 0.9, 1.2, 0.8])
    add = 10 + t + s[t % 4]
    mul = (10 + t) * f[t % 4]
    for y, kind in ((add, "additive"), (mul, "multiplicative")):
        model = T.hw_fit(y[:40], 4, kind)
        assert np.allclose(T.hw_forecast(model, 8), y[40:], atol=1e-6)
