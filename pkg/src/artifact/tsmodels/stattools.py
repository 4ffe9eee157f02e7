"""Correlograms, the augmented Dickey-Fuller test and classical decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientDataError, ParameterError

# MacKinnon (2010) response surface, constant-only regression, one series, 5% level:
# crit(T) = b0 + b1/T + b2/T^2 + b3/T^3
ADF_CRIT_5PCT_CONSTANT = (-2.86154, -2.8903, -4.234, -40.040)


def _series(x) -> np.ndarray:
    x = np.asarray(getattr(x, "close", x), dtype=float)
    if x.ndim != 1:
        raise ParameterError("expected a one-dimensional series")
    return x


# --------------------------------------------------------------------------
# ACF / PACF

def acf(x, n_lags: int) -> np.ndarray:
    """Biased sample autocorrelations for lags 0..n_lags."""
    x = _series(x)
    n = len(x)
    if n_lags < 0 or n_lags >= n:
        raise ParameterError(f"n_lags must be in [0, {n - 1}], got {n_lags}")
    d = x - x.mean()
    denom = d @ d
    if denom == 0:
        raise ParameterError("autocorrelation is undefined for a constant series")
    return np.array([d[: n - k] @ d[k:] for k in range(n_lags + 1)]) / denom


def durbin_levinson(rho: np.ndarray) -> np.ndarray:
    """Partial autocorrelations from autocorrelations ``rho[0..K]``."""
    K = len(rho) - 1
    pacf = np.zeros(K + 1)
    pacf[0] = 1.0
    if K == 0:
        return pacf
    phi = np.zeros(K + 1)
    phi[1] = rho[1]
    pacf[1] = rho[1]
    v = 1.0 - rho[1] ** 2
    for k in range(2, K + 1):
        if v <= 0:
            break
        num = rho[k] - phi[1:k] @ rho[k - 1:0:-1]
        a = num / v
        new = phi.copy()
        new[1:k] = phi[1:k] - a * phi[k - 1:0:-1]
        new[k] = a
        phi = new
        pacf[k] = a
        v *= 1.0 - a * a
    return pacf


def pacf(x, n_lags: int) -> np.ndarray:
    return durbin_levinson(acf(x, n_lags))


def correlogram(series, n_lags: int, kind: str = "acf") -> np.ndarray:
    if kind == "acf":
        return acf(series, n_lags)
    if kind == "pacf":
        return pacf(series, n_lags)
    raise ParameterError(f"correlogram kind must be 'acf' or 'pacf', got {kind!r}")


# --------------------------------------------------------------------------
# augmented Dickey-Fuller

@dataclass(frozen=True)
class AdfResult:
    statistic: float
    critical_value_5pct: float
    is_stationary: bool
    used_lag: int
    n_obs: int


def adf_critical_value(n_obs: int) -> float:
    b0, b1, b2, b3 = ADF_CRIT_5PCT_CONSTANT
    return b0 + b1 / n_obs + b2 / n_obs**2 + b3 / n_obs**3


def default_max_lags(n: int) -> int:
    """Schwert's rule 12*(n/100)^(1/4), capped so the test stays runnable."""
    return max(0, min(int(np.ceil(12.0 * (n / 100.0) ** 0.25)), n - 25))


def _adf_design(x, lags, start):
    """Regressors [1, y_{t-1}, dy_{t-1..t-lags}] for t indices in dy from ``start``."""
    dy = np.diff(x)
    rows = np.arange(start, len(dy))
    cols = [np.ones(len(rows)), x[rows]]
    cols += [dy[rows - i] for i in range(1, lags + 1)]
    return np.column_stack(cols), dy[rows]


def _ols(X, y):
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return beta, resid


def adf_test(series, max_lags: int | None = None) -> AdfResult:
    """Constant-only ADF unit-root test with AIC lag selection.

    Lags 0..max_lags are compared on a common sample; the chosen lag is
    then re-estimated on all available observations.
    """
    x = _series(series)
    n = len(x)
    if max_lags is None:
        max_lags = default_max_lags(n)
    if max_lags < 0:
        raise ParameterError(f"max_lags must be >= 0, got {max_lags}")
    if n < 25 + max_lags:
        raise InsufficientDataError(f"ADF with max_lags={max_lags} needs {25 + max_lags} observations, got {n}")
    if np.ptp(x) == 0:
        raise ParameterError("ADF test is undefined for a constant series")

    best_lag, best_aic = 0, np.inf
    for lags in range(max_lags + 1):
        X, y = _adf_design(x, lags, max_lags)
        _, resid = _ols(X, y)
        ssr = resid @ resid
        m = len(y)
        aic = m * np.log(ssr / m) + 2 * X.shape[1] if ssr > 0 else -np.inf
        if aic < best_aic - 1e-12:
            best_lag, best_aic = lags, aic

    X, y = _adf_design(x, best_lag, best_lag)
    beta, resid = _ols(X, y)
    m, k = X.shape
    s2 = resid @ resid / (m - k)
    xtx_inv = np.linalg.pinv(X.T @ X)
    se = np.sqrt(s2 * xtx_inv[1, 1])
    stat = float(beta[1] / se) if se > 0 else -np.inf
    crit = adf_critical_value(m)
    return AdfResult(stat, crit, bool(stat < crit), best_lag, m)


# --------------------------------------------------------------------------
# classical additive decomposition

@dataclass(frozen=True)
class DecompositionResult:
    observed: np.ndarray
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int
    dates: np.ndarray | None = None


def decompose(series, period: int) -> DecompositionResult:
    """Centred-moving-average trend, per-phase seasonal means, remainder.

    Even periods use the 2 x period moving average. Trend and residual are
    NaN in the half-window margins.
    """
    dates = getattr(series, "dates", None)
    x = _series(series)
    n = len(x)
    if int(period) != period or period < 2:
        raise ParameterError(f"period must be an integer >= 2, got {period}")
    period = int(period)
    if n < 2 * period:
        raise ParameterError(f"decomposition with period {period} needs {2 * period} observations, got {n}")

    if period % 2:
        weights = np.ones(period) / period
    else:
        weights = np.r_[0.5, np.ones(period - 1), 0.5] / period
    half = len(weights) // 2
    trend = np.full(n, np.nan)
    trend[half: n - half] = np.convolve(x, weights, mode="valid")

    detrended = x - trend
    phase = np.arange(n) % period
    means = np.array([np.nanmean(detrended[phase == p]) for p in range(period)])
    means -= means.mean()
    seasonal = means[phase]
    residual = x - trend - seasonal
    return DecompositionResult(x, trend, seasonal, residual, period, dates)
