"""Non-seasonal ARIMA by conditional sum of squares with automatic orders.

The ARMA part on the d-times differenced series w is

    w_t = c + sum_i phi_i w_{t-i} + e_t + sum_j theta_j e_{t-j}

with pre-sample residuals set to zero. All (p, q) candidates for one d are
scored on the same conditioning window so their AIC values are comparable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from ..errors import FitError, InsufficientDataError, ParameterError
from .stattools import adf_test

logger = logging.getLogger(__name__)

ROOT_TOL = 1e-6
# AR and MA inverse roots closer than this are treated as a common factor
REDUNDANCY_TOL = 0.1
_PENALTY = 1e300


@dataclass(frozen=True)
class ArimaModel:
    p: int
    d: int
    q: int
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    intercept: float = 0.0
    sigma2: float = float("nan")
    aic: float = float("nan")
    n_obs: int = 0
    attempts: tuple = field(default=(), compare=False, repr=False)

    kind = "arima"

    def __post_init__(self):
        if len(self.ar) != self.p or len(self.ma) != self.q:
            raise ParameterError(
                f"coefficient lengths ({len(self.ar)}, {len(self.ma)}) do not match orders ({self.p}, {self.q})"
            )

    @property
    def order(self) -> tuple[int, int, int]:
        return (self.p, self.d, self.q)


def difference(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.diff(x, n=d) if d else x


def roots_outside_unit_circle(coefs, sign: float) -> bool:
    """True when 1 + sign*(c_1 z + ... + c_k z^k) has all roots with |z| > 1."""
    coefs = np.asarray(coefs, dtype=float)
    if coefs.size == 0 or not np.any(coefs):
        return True
    poly = np.r_[1.0, sign * coefs][::-1]
    poly = np.trim_zeros(poly, "f")
    if len(poly) < 2:
        return True
    return bool(np.min(np.abs(np.roots(poly))) > 1.0 + ROOT_TOL)


def _stable(coefs) -> bool:
    """Step-down test: x_t = sum c_i x_{t-i} is stable iff every |reflection| < 1."""
    a = [float(c) for c in coefs]
    for k in range(len(a), 0, -1):
        r = a[k - 1]
        if not abs(r) < 1.0:
            return False
        if k > 1:
            scale = 1.0 - r * r
            a = [(a[i] + r * a[k - 2 - i]) / scale for i in range(k - 1)]
    return True


def inverse_roots(coefs, sign: float) -> np.ndarray:
    coefs = np.asarray(coefs, dtype=float)
    if coefs.size == 0:
        return np.zeros(0, complex)
    return np.roots(np.r_[1.0, sign * coefs])


def has_common_factor(ar, ma, tol: float = REDUNDANCY_TOL) -> bool:
    """True when some AR inverse root nearly coincides with an MA inverse root."""
    a, b = inverse_roots(ar, -1.0), inverse_roots(ma, 1.0)
    if a.size == 0 or b.size == 0:
        return False
    return bool(np.min(np.abs(a[:, None] - b[None, :])) < tol)


def is_stationary(ar) -> bool:
    return roots_outside_unit_circle(ar, -1.0)


def is_invertible(ma) -> bool:
    return roots_outside_unit_circle(ma, 1.0)


def css_residuals(w, intercept, ar, ma, start: int) -> np.ndarray:
    """Residuals e_start..e_{n-1}, pre-sample residuals taken as zero."""
    w = np.asarray(w, dtype=float)
    u = w[start:] - intercept
    for i, phi in enumerate(ar, 1):
        u = u - phi * w[start - i: len(w) - i]
    if len(ma):
        u = lfilter([1.0], np.r_[1.0, ma], u)
    return u


def _lag_matrix(w, lags, start):
    return np.column_stack([w[start - i: len(w) - i] for i in range(1, lags + 1)]) if lags else np.empty((len(w) - start, 0))


def hannan_rissanen(w, p: int, q: int, with_intercept: bool = True):
    """Two-stage regression estimate used to start the CSS search."""
    w = np.asarray(w, dtype=float)
    n = len(w)
    if q == 0:
        X = np.column_stack([np.ones(n - p)] * with_intercept + [_lag_matrix(w, p, p)])
        beta, *_ = np.linalg.lstsq(X, w[p:], rcond=None)
        c = beta[0] if with_intercept else 0.0
        return float(c), beta[int(with_intercept):], np.zeros(0)

    long_order = int(min(max(p + q, int(np.ceil(10 * np.log10(n)))), n // 4))
    Xl = np.column_stack([np.ones(n - long_order), _lag_matrix(w, long_order, long_order)])
    bl, *_ = np.linalg.lstsq(Xl, w[long_order:], rcond=None)
    e = np.zeros(n)
    e[long_order:] = w[long_order:] - Xl @ bl

    start = long_order + q
    cols = [np.ones(n - start)] * with_intercept
    cols += [_lag_matrix(w, p, start)] if p else []
    cols += [np.column_stack([e[start - j: n - j] for j in range(1, q + 1)])]
    X = np.column_stack(cols)
    beta, *_ = np.linalg.lstsq(X, w[start:], rcond=None)
    off = int(with_intercept)
    c = beta[0] if with_intercept else 0.0
    return float(c), beta[off: off + p], beta[off + p:]


def _shrink_to_admissible(ar, ma):
    ar, ma = np.array(ar, float), np.array(ma, float)
    for _ in range(50):
        if is_stationary(ar) and is_invertible(ma):
            return ar, ma
        ar *= 0.9
        ma *= 0.9
    return np.zeros_like(ar), np.zeros_like(ma)


def fit_arma_css(w, p: int, q: int, start: int, with_intercept: bool = True):
    """Fit one ARMA(p, q) by CSS.

    Returns ``(c, ar, ma, css, n_eff)``, or None when the fit is not
    stationary, not invertible, or has a near-common AR/MA factor.
    """
    w = np.asarray(w, dtype=float)
    n_eff = len(w) - start
    c0, ar0, ma0 = hannan_rissanen(w, p, q, with_intercept)

    if q == 0:
        # pure AR: least squares on the common window is the exact CSS minimiser
        X = np.column_stack([np.ones(n_eff)] * with_intercept + [_lag_matrix(w, p, start)])
        if X.shape[1]:
            beta, *_ = np.linalg.lstsq(X, w[start:], rcond=None)
        else:
            beta = np.zeros(0)
        c = float(beta[0]) if with_intercept else 0.0
        ar = beta[int(with_intercept):]
        ma = np.zeros(0)
    else:
        ar0, ma0 = _shrink_to_admissible(ar0, ma0)
        k = int(with_intercept)

        def unpack(theta):
            c = theta[0] if with_intercept else 0.0
            return c, theta[k: k + p], theta[k + p:]

        def objective(theta):
            c, ar, ma = unpack(theta)
            if not (_stable(ar) and _stable(-ma)):
                return _PENALTY
            e = css_residuals(w, c, ar, ma, start)
            val = float(e @ e)
            return val if np.isfinite(val) else _PENALTY

        x0 = np.r_[[c0] * with_intercept, ar0, ma0]
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 400 * len(x0), "maxfev": 600 * len(x0)},
        )
        c, ar, ma = unpack(res.x)

    if not (is_stationary(ar) and is_invertible(ma)):
        return None
    if has_common_factor(ar, ma):
        return None
    e = css_residuals(w, c, ar, ma, start)
    css = float(e @ e)
    if not np.isfinite(css):
        return None
    return float(c), np.asarray(ar, float), np.asarray(ma, float), css, n_eff


def _aic(css, n_eff, n_params):
    sigma2 = css / n_eff
    if sigma2 <= 0:
        return sigma2, -np.inf
    return sigma2, n_eff * np.log(sigma2) + 2 * n_params


def choose_d(x, max_d: int, max_lags=None) -> int:
    """Smallest differencing count whose series passes the ADF test."""
    for d in range(max_d + 1):
        w = difference(x, d)
        if np.ptp(w) == 0:
            return d
        if adf_test(w, max_lags).is_stationary:
            return d
    logger.warning("no differencing up to d=%d passed the ADF test; using d=%d", max_d, max_d)
    return max_d


def arima_auto_fit(train, max_p: int = 3, max_q: int = 3, max_d: int = 2, adf_max_lags=None) -> ArimaModel:
    """Pick d by repeated ADF testing, then (p, q) by minimum AIC.

    An intercept is estimated only when d = 0, so differenced models
    forecast without drift.
    """
    x = np.asarray(getattr(train, "close", train), dtype=float)
    if len(x) < 50:
        raise InsufficientDataError(f"ARIMA needs at least 50 observations, got {len(x)}")
    if min(max_p, max_q, max_d) < 0:
        raise ParameterError("order bounds must be non-negative")

    d = choose_d(x, max_d, adf_max_lags)
    w = difference(x, d)
    with_intercept = d == 0
    if np.ptp(w) == 0:
        logger.info("series is constant after %d differences; returning mean model", d)
        return ArimaModel(0, d, 0, (), (), float(w[0]) if with_intercept else 0.0, 0.0, float("-inf"), len(x))

    start = max_p
    cells = sorted(((p, q) for p in range(max_p + 1) for q in range(max_q + 1)), key=lambda pq: (pq[0] + pq[1], pq[0]))
    best = None
    attempts = []
    for p, q in cells:
        fit = fit_arma_css(w, p, q, start, with_intercept)
        if fit is None:
            attempts.append((p, d, q, "inadmissible"))
            continue
        c, ar, ma, css, n_eff = fit
        sigma2, aic = _aic(css, n_eff, p + q + int(with_intercept) + 1)
        attempts.append((p, d, q, round(float(aic), 6)))
        if best is None or aic < best[0]:
            best = (aic, p, q, c, ar, ma, sigma2)
    if best is None:
        raise FitError("no stationary and invertible ARMA fit found", attempts)
    aic, p, q, c, ar, ma, sigma2 = best
    return ArimaModel(
        p, d, q,
        tuple(float(v) for v in ar),
        tuple(float(v) for v in ma),
        float(c),
        float(sigma2),
        float(aic),
        len(x),
        tuple(attempts),
    )


def arima_forecast(model: ArimaModel, last_observations, h: int) -> np.ndarray:
    """Iterate the ARMA recursion with zero future shocks, then undifference."""
    if int(h) != h or h < 1:
        raise ParameterError(f"forecast horizon must be a positive integer, got {h}")
    x = np.asarray(getattr(last_observations, "close", last_observations), dtype=float)
    p, d, q = model.order
    need = max(d + p + q, d, 1) if (p or q or d) else 0
    if len(x) < need:
        raise ParameterError(f"ARIMA{model.order} forecasting needs {need} trailing observations, got {len(x)}")

    ar = np.asarray(model.ar, float)
    ma = np.asarray(model.ma, float)
    w = difference(x, d) if len(x) else np.zeros(0)
    e = np.zeros(len(w))
    if q and len(w) > p:
        e[p:] = css_residuals(w, model.intercept, ar, ma, p)

    hist_w = list(w)
    hist_e = list(e)
    out = []
    for _ in range(int(h)):
        val = model.intercept
        for i in range(1, p + 1):
            val += ar[i - 1] * hist_w[-i]
        for j in range(1, q + 1):
            val += ma[j - 1] * hist_e[-j]
        hist_w.append(val)
        hist_e.append(0.0)
        out.append(val)
    fc = np.array(out)

    for k in range(d - 1, -1, -1):
        anchor = difference(x, k)[-1]
        fc = anchor + np.cumsum(fc)
    return fc
