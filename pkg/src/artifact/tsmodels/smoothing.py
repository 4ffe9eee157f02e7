"""Exponential smoothing: simple, Holt linear trend and Holt-Winters.

Each ``*_fit`` grid-searches its smoothing constants by in-sample one-step
MSE. The recursions run once over time with every grid combination carried
along as a vector, so a 20x20x20 Holt-Winters grid costs about as much as a
handful of scalar passes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientDataError, ParameterError

DEFAULT_GRID = tuple(np.round(np.arange(0.01, 0.99 + 1e-9, 0.05), 10))
DEFAULT_SEASON_LENGTH = 5


def _as_series(train) -> np.ndarray:
    y = np.asarray(getattr(train, "close", train), dtype=float)
    if y.ndim != 1:
        raise ParameterError("expected a one-dimensional series")
    if not np.all(np.isfinite(y)):
        raise ParameterError("series contains non-finite values")
    return y


def _as_grid(grid, name) -> np.ndarray:
    g = np.unique(np.asarray(grid if grid is not None else DEFAULT_GRID, dtype=float))
    if g.size == 0:
        raise ParameterError(f"{name} grid is empty")
    if np.any((g < 0) | (g > 1)):
        raise ParameterError(f"{name} grid values must lie in [0, 1]")
    return g


def _check_h(h) -> int:
    if int(h) != h or h < 1:
        raise ParameterError(f"forecast horizon must be a positive integer, got {h}")
    return int(h)


# --------------------------------------------------------------------------
# simple exponential smoothing

@dataclass(frozen=True)
class SesModel:
    alpha: float
    initial_forecast: float
    last_forecast: float
    mse: float = float("nan")
    n_obs: int = 0

    kind = "ses"


def ses_one_step(y, alpha) -> np.ndarray:
    """Forecasts F_1..F_{n+1} for a scalar alpha, with F_1 = y_1."""
    y = _as_series(y)
    f = np.empty(len(y) + 1)
    f[0] = y[0]
    for t in range(len(y)):
        f[t + 1] = alpha * y[t] + (1 - alpha) * f[t]
    return f


def ses_fit(train, alpha_grid=None) -> SesModel:
    """Choose alpha from the grid by minimum one-step MSE (ties: smallest)."""
    y = _as_series(train)
    if len(y) < 2:
        raise ParameterError(f"SES needs at least 2 observations, got {len(y)}")
    a = _as_grid(alpha_grid, "alpha")
    f = np.full(a.shape, y[0])
    sse = np.zeros(a.shape)
    for t in range(1, len(y)):
        f = a * y[t - 1] + (1 - a) * f
        sse += (y[t] - f) ** 2
    mse = sse / (len(y) - 1)
    best = int(np.argmin(mse))
    last = a[best] * y[-1] + (1 - a[best]) * f[best]
    return SesModel(float(a[best]), float(y[0]), float(last), float(mse[best]), len(y))


def ses_forecast(model: SesModel, h: int) -> np.ndarray:
    return np.full(_check_h(h), model.last_forecast)


# --------------------------------------------------------------------------
# Holt linear trend

@dataclass(frozen=True)
class HoltModel:
    alpha: float
    beta: float
    level: float
    trend: float
    mse: float = float("nan")
    n_obs: int = 0

    kind = "holt"


def _holt_run(y, alpha, beta):
    """Run Holt's recursion for broadcastable parameter arrays.

    Returns final level, final trend and the one-step SSE over t = 3..n
    (the t = 2 forecast is exact by construction of the initial trend).
    """
    level = np.full(np.broadcast(alpha, beta).shape, y[0])
    trend = np.full(level.shape, y[1] - y[0])
    sse = np.zeros(level.shape)
    for t in range(1, len(y)):
        pred = level + trend
        if t >= 2:
            sse += (y[t] - pred) ** 2
        new_level = alpha * y[t] + (1 - alpha) * pred
        trend = beta * (new_level - level) + (1 - beta) * trend
        level = new_level
    return level, trend, sse


def holt_fit(train, param_grid=None) -> HoltModel:
    """Grid-fit Holt's linear trend method.

    ``param_grid`` is either one sequence used for both alpha and beta or a
    mapping with ``alpha`` and ``beta`` entries.
    """
    y = _as_series(train)
    if len(y) < 3:
        raise InsufficientDataError(f"Holt needs at least 3 observations, got {len(y)}")
    grids = _split_grid(param_grid, ("alpha", "beta"))
    A, B = np.meshgrid(grids["alpha"], grids["beta"], indexing="ij")
    level, trend, sse = _holt_run(y, A.ravel(), B.ravel())
    best = int(np.argmin(sse))
    return HoltModel(
        float(A.ravel()[best]),
        float(B.ravel()[best]),
        float(level[best]),
        float(trend[best]),
        float(sse[best] / (len(y) - 2)),
        len(y),
    )


def holt_one_step(y, alpha, beta) -> np.ndarray:
    """In-sample one-step forecasts for t = 2..n (index 0 holds t = 2)."""
    y = _as_series(y)
    level, trend = y[0], y[1] - y[0]
    out = []
    for t in range(1, len(y)):
        pred = level + trend
        out.append(pred)
        new_level = alpha * y[t] + (1 - alpha) * pred
        trend = beta * (new_level - level) + (1 - beta) * trend
        level = new_level
    return np.array(out)


def holt_forecast(model: HoltModel, h: int) -> np.ndarray:
    steps = np.arange(1, _check_h(h) + 1)
    return model.level + steps * model.trend


def _split_grid(param_grid, names):
    if param_grid is None or not hasattr(param_grid, "keys"):
        return {name: _as_grid(param_grid, name) for name in names}
    return {name: _as_grid(param_grid.get(name), name) for name in names}


# --------------------------------------------------------------------------
# Holt-Winters

@dataclass(frozen=True)
class HoltWintersModel:
    alpha: float
    beta: float
    gamma: float
    season_length: int
    seasonal_kind: str
    level: float
    trend: float
    seasonal: tuple[float, ...]
    mse: float = float("nan")
    n_obs: int = 0

    kind = "holt_winters"


def seasonal_index(n: int, h: int, m: int) -> int:
    """Time index of the seasonal term used for the h-step forecast from n.

    The forecast reuses the estimate from the final observed cycle:
    ``n + h - m*(k + 1)`` with ``k = (h - 1) // m``.
    """
    k = (h - 1) // m
    return n + h - m * (k + 1)


def hw_initial_state(y, m: int, seasonal_kind: str, max_iter: int = 200, tol: float = 1e-13):
    """Initial level, trend and seasonal indices from the first two cycles.

    The starting point is the first-cycle mean for level and the difference
    of the first two cycle means over ``m`` for trend; the seasonal indices
    are the first-cycle deviations from that trend line, centred to sum 0
    (additive) or average 1 (multiplicative). Level and trend are then
    re-estimated from the deseasonalised first two cycles until the state
    stops moving, which makes the start exact for noise-free data.

    Returns ``(level_0, trend_0, seasonal)`` where level and trend refer to
    time 0 (just before the first observation) and ``seasonal[i]`` is the
    index for observation ``i + 1``.
    """
    y = np.asarray(y, dtype=float)
    first, second = y[:m], y[m:2 * m]
    t = np.arange(1, m + 1, dtype=float)
    centre = (m + 1) / 2.0
    mult = seasonal_kind == "multiplicative"
    if mult and np.any(y[: 2 * m] <= 0):
        raise ParameterError("multiplicative seasonality needs positive observations")

    seasonal = np.ones(m) if mult else np.zeros(m)
    level = trend = 0.0
    for _ in range(max_iter):
        d1 = first / seasonal if mult else first - seasonal
        d2 = second / seasonal if mult else second - seasonal
        new_trend = (d2.mean() - d1.mean()) / m
        new_level = d1.mean() - new_trend * centre
        line = new_level + new_trend * t
        if mult:
            new_seasonal = first / line
            new_seasonal = new_seasonal / new_seasonal.mean()
        else:
            new_seasonal = first - line
            new_seasonal = new_seasonal - new_seasonal.mean()
        delta = max(
            abs(new_level - level),
            abs(new_trend - trend),
            float(np.max(np.abs(new_seasonal - seasonal))),
        )
        level, trend, seasonal = new_level, new_trend, new_seasonal
        if delta <= tol * max(1.0, abs(level)):
            break
    return float(level), float(trend), seasonal


def _hw_run(y, m, seasonal_kind, alpha, beta, gamma, init):
    """Vectorised Holt-Winters recursion over parameter arrays.

    Returns level, trend, the last m seasonal indices (oldest first, shape
    ``(m,) + params``) and the one-step SSE over all observations.
    """
    level0, trend0, seas0 = init
    shape = np.broadcast(alpha, beta, gamma).shape
    level = np.full(shape, level0)
    trend = np.full(shape, trend0)
    # ring buffer: seasonal[j] holds s_{t-m} when j == t mod m
    seasonal = np.empty((m,) + shape)
    for i in range(m):
        seasonal[(i + 1) % m] = seas0[i]
    sse = np.zeros(shape)
    mult = seasonal_kind == "multiplicative"
    for t in range(1, len(y) + 1):
        obs = y[t - 1]
        s_prev = seasonal[t % m]
        base = level + trend
        pred = base * s_prev if mult else base + s_prev
        sse += (obs - pred) ** 2
        if mult:
            new_level = alpha * (obs / s_prev) + (1 - alpha) * base
            new_seas = gamma * (obs / base) + (1 - gamma) * s_prev
        else:
            new_level = alpha * (obs - s_prev) + (1 - alpha) * base
            new_seas = gamma * (obs - level - trend) + (1 - gamma) * s_prev
        trend = beta * (new_level - level) + (1 - beta) * trend
        level = new_level
        seasonal[t % m] = new_seas
    n = len(y)
    order = [(n - m + 1 + i) % m for i in range(m)]
    return level, trend, seasonal[order], sse


def hw_fit(train, m: int = DEFAULT_SEASON_LENGTH, kind: str = "additive", param_grid=None) -> HoltWintersModel:
    """Grid-fit additive or multiplicative Holt-Winters with season length m."""
    y = _as_series(train)
    if kind not in ("additive", "multiplicative"):
        raise ParameterError(f"unknown Holt-Winters kind {kind!r}")
    if int(m) != m or m < 2:
        raise ParameterError(f"season length must be an integer >= 2, got {m}")
    m = int(m)
    if len(y) < 2 * m:
        raise InsufficientDataError(
            f"Holt-Winters with m={m} needs two full seasons ({2 * m} observations), got {len(y)}"
        )
    grids = _split_grid(param_grid, ("alpha", "beta", "gamma"))
    A, B, G = (g.ravel() for g in np.meshgrid(grids["alpha"], grids["beta"], grids["gamma"], indexing="ij"))
    init = hw_initial_state(y, m, kind)
    level, trend, seasonal, sse = _hw_run(y, m, kind, A, B, G, init)
    sse = np.where(np.isfinite(sse), sse, np.inf)
    best = int(np.argmin(sse))
    return HoltWintersModel(
        float(A[best]),
        float(B[best]),
        float(G[best]),
        m,
        kind,
        float(level[best]),
        float(trend[best]),
        tuple(float(v) for v in seasonal[:, best]),
        float(sse[best] / len(y)),
        len(y),
    )


def hw_forecast(model: HoltWintersModel, h: int) -> np.ndarray:
    h = _check_h(h)
    m = model.season_length
    seasonal = np.asarray(model.seasonal)
    out = np.empty(h)
    for step in range(1, h + 1):
        # seasonal holds s_{n-m+1..n}; index n+h-m(k+1) maps to offset (h-1) mod m
        s = seasonal[seasonal_index(m - 1, step, m)]
        base = model.level + step * model.trend
        out[step - 1] = base * s if model.seasonal_kind == "multiplicative" else base + s
    return out

