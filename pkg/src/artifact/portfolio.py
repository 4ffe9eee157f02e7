"""Return/risk statistics, portfolio construction, share allocation, backtests.

Weights are found two ways: closed forms without the long-only
constraint, and for long-only portfolios a seeded Monte Carlo search over
the simplex polished by pairwise weight transfers.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from dataclasses import dataclass
from decimal import ROUND_FLOOR, Decimal, localcontext
from typing import Sequence

import numpy as np

from .errors import (
    DataError,
    InsufficientDataError,
    NumericError,
    ParameterError,
    ShapeError,
    UndefinedMetricError,
)

logger = logging.getLogger(__name__)

TRADING_DAYS = 250
DEFAULT_RISK_FREE = 0.01
DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 42
IMPROVE_STEP = 1e-4
IMPROVE_PASSES = 1000
IMPROVE_MIN_STEP = 1e-9
COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class AssetPanel:
    symbols: tuple[str, ...]
    dates: np.ndarray
    closes: np.ndarray  # dates x symbols

    def __post_init__(self):
        closes = np.array(self.closes, dtype=float)
        dates = np.array(self.dates, dtype="datetime64[D]")
        if closes.ndim != 2 or closes.shape != (len(dates), len(self.symbols)):
            raise ShapeError(f"closes {closes.shape} do not match {len(dates)} dates x {len(self.symbols)} symbols")
        if not np.all(closes > 0):
            raise DataError("all closes must be positive")
        closes.setflags(write=False)
        dates.setflags(write=False)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "dates", dates)

    @classmethod
    def from_series(cls, series: Sequence) -> "AssetPanel":
        if not series:
            raise DataError("no series given")
        dates = series[0].dates
        for s in series[1:]:
            if not np.array_equal(s.dates, dates):
                raise DataError(f"{s.symbol} does not share the calendar of {series[0].symbol}; align first")
        return cls(tuple(s.symbol for s in series), dates, np.column_stack([s.close for s in series]))

    def column(self, symbol) -> np.ndarray:
        return self.closes[:, self.symbols.index(symbol)]


@dataclass(frozen=True, eq=False)
class AssetStats:
    symbols: tuple[str, ...]
    annual_returns: np.ndarray
    annual_volatilities: np.ndarray
    covariance: np.ndarray
    daily_volatilities: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "annual_returns": self.annual_returns.tolist(),
            "annual_volatilities": self.annual_volatilities.tolist(),
            "daily_volatilities": None if self.daily_volatilities is None else self.daily_volatilities.tolist(),
            "covariance": self.covariance.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Weights:
    symbols: tuple[str, ...]
    values: np.ndarray
    long_only: bool = True
    note: str | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(v) != len(self.symbols):
            raise ShapeError(f"{len(v)} weights for {len(self.symbols)} symbols")
        if abs(v.sum() - 1.0) > 1e-9:
            raise ParameterError(f"weights sum to {v.sum()!r}, expected 1")
        if self.long_only and np.any(v < 0):
            raise ParameterError("long-only weights must be non-negative")

    def __len__(self):
        return len(self.values)


# --------------------------------------------------------------------------
# statistics

def daily_returns(panel: AssetPanel) -> np.ndarray:
    return panel.closes[1:] / panel.closes[:-1] - 1.0


def calendar_year_returns(panel: AssetPanel) -> tuple[list[int], np.ndarray]:
    """Compounded return of each calendar year, per symbol.

    A year's return runs from the last close of the previous year (or the
    first close in the panel) to its own last close.
    """
    years = panel.dates.astype("datetime64[Y]").astype(int) + 1970
    growth = np.vstack([np.ones(len(panel.symbols)), panel.closes[1:] / panel.closes[:-1]])
    labels = sorted(set(years.tolist()))
    out = []
    for yr in labels:
        mask = years == yr
        out.append(np.prod(growth[mask], axis=0) - 1.0)
    return labels, np.array(out)


def compute_stats(panel: AssetPanel, trading_days: int = TRADING_DAYS) -> AssetStats:
    if len(panel.dates) < 2:
        raise InsufficientDataError(f"need at least 2 dates, got {len(panel.dates)}")
    r = daily_returns(panel)
    if len(r) >= 2:
        daily_vol = r.std(axis=0, ddof=1)
        cov = np.atleast_2d(np.cov(r, rowvar=False, ddof=1))
    else:
        daily_vol = np.zeros(r.shape[1])
        cov = np.zeros((r.shape[1], r.shape[1]))
    cov = (cov + cov.T) / 2.0 * trading_days
    annual_vol = np.sqrt(np.diag(cov))
    _, yearly = calendar_year_returns(panel)
    return AssetStats(panel.symbols, yearly.mean(axis=0), annual_vol, cov, daily_vol)


def annualize_volatility(daily_volatility, trading_days: int = TRADING_DAYS):
    return np.asarray(daily_volatility) * math.sqrt(trading_days)


# --------------------------------------------------------------------------
# portfolio arithmetic

def equal_weight(n, symbols: Sequence[str] | None = None) -> Weights:
    if not isinstance(n, (int, np.integer)):
        symbols = tuple(n)
        n = len(symbols)
    if n < 1:
        raise ParameterError("equal_weight needs at least one asset")
    symbols = tuple(symbols) if symbols is not None else tuple(f"A{i}" for i in range(n))
    return Weights(symbols, np.full(n, 1.0 / n))


def _values(weights) -> np.ndarray:
    return np.asarray(getattr(weights, "values", weights), dtype=float)


def portfolio_stats(weights, stats: AssetStats) -> tuple[float, float]:
    w = _values(weights)
    if w.shape != (len(stats.symbols),):
        raise ShapeError(f"{w.size} weights for {len(stats.symbols)} assets")
    ret = float(w @ stats.annual_returns)
    var = float(w @ stats.covariance @ w)
    return ret, math.sqrt(max(var, 0.0))


def sharpe_ratio(portfolio_return: float, risk_free_rate: float, portfolio_volatility: float) -> float:
    if not portfolio_volatility > 0:
        raise UndefinedMetricError("Sharpe ratio is undefined at zero volatility")
    return (portfolio_return - risk_free_rate) / portfolio_volatility


# --------------------------------------------------------------------------
# optimisation

def _solve(cov, rhs, ridge):
    cov = np.asarray(cov, dtype=float)
    cond = np.linalg.cond(cov)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        if not ridge:
            raise NumericError("covariance matrix is singular; pass ridge > 0 to regularise")
        cov = cov + ridge * np.eye(len(cov)) * max(np.trace(cov) / len(cov), 1e-12)
    return np.linalg.solve(cov, rhs)


def min_variance_closed_form(stats: AssetStats, ridge: float = 0.0) -> np.ndarray:
    ones = np.ones(len(stats.symbols))
    x = _solve(stats.covariance, ones, ridge)
    return x / x.sum()


def tangency_closed_form(stats: AssetStats, risk_free_rate: float = DEFAULT_RISK_FREE, ridge: float = 0.0) -> np.ndarray:
    excess = stats.annual_returns - risk_free_rate
    x = _solve(stats.covariance, excess, ridge)
    total = x.sum()
    if abs(total) < 1e-15:
        raise NumericError("tangency weights cannot be normalised (zero net exposure)")
    return x / total


def sample_simplex(n_samples: int, n_assets: int, seed: int) -> np.ndarray:
    """Uniform draws on the probability simplex via normalised exponentials."""
    rng = np.random.default_rng(seed)
    e = rng.exponential(size=(n_samples, n_assets))
    return e / e.sum(axis=1, keepdims=True)


def _variance(W, cov):
    return np.einsum("ij,jk,ik->i", W, cov, W)


def _better(candidate, incumbent):
    return candidate < incumbent - 1e-12 * max(1.0, abs(incumbent))


def _improve_pairs(w, objective, step=IMPROVE_STEP, max_passes=IMPROVE_PASSES, min_step=IMPROVE_MIN_STEP):
    """Move weight between asset pairs while the objective drops.

    Each successful move doubles the transfer size; a failure falls back to
    the base step. Once no base-step transfer helps, the base step shrinks
    tenfold until it falls below ``min_step``.
    """
    w = w.copy()
    best = objective(w)
    pairs = [(i, j) for i, j in itertools.permutations(range(len(w)), 2)]
    for _ in range(max_passes):
        moved = False
        for i, j in pairs:
            size = step
            while w[j] > 0:
                amount = min(size, w[j])
                trial = w.copy()
                trial[i] += amount
                trial[j] -= amount
                val = objective(trial)
                if _better(val, best):
                    w, best = trial, val
                    moved = True
                    size *= 2
                elif size > step:
                    size = step
                else:
                    break
        if not moved:
            step /= 10.0
            if step < min_step:
                break
    return w, best


def _search_long_only(stats, objective_batch, objective, mc_samples, seed):
    k = len(stats.symbols)
    incumbent = np.full(k, 1.0 / k)
    best = objective(incumbent)
    if mc_samples:
        W = sample_simplex(mc_samples, k, seed)
        vals = objective_batch(W)
        j = int(np.argmin(vals))
        if _better(vals[j], best):
            incumbent, best = W[j], vals[j]
    w, _ = _improve_pairs(incumbent, objective)
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def min_variance(
    stats: AssetStats,
    long_only: bool = True,
    mc_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    ridge: float = 0.0,
) -> Weights:
    k = len(stats.symbols)
    if k == 1:
        return Weights(stats.symbols, [1.0], long_only)
    cov = stats.covariance
    if not long_only:
        return Weights(stats.symbols, min_variance_closed_form(stats, ridge), False)
    w = _search_long_only(
        stats,
        lambda W: _variance(W, cov),
        lambda v: float(v @ cov @ v),
        mc_samples,
        seed,
    )
    return Weights(stats.symbols, w, True)


def max_sharpe(
    stats: AssetStats,
    risk_free_rate: float = DEFAULT_RISK_FREE,
    long_only: bool = True,
    mc_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    ridge: float = 0.0,
) -> Weights:
    k = len(stats.symbols)
    mu, cov = stats.annual_returns, stats.covariance
    note = None
    if np.all(mu <= risk_free_rate):
        note = "degenerate: no asset return exceeds the risk-free rate"
        logger.warning(note)
    if k == 1:
        return Weights(stats.symbols, [1.0], long_only, note)
    if not long_only:
        return Weights(stats.symbols, tangency_closed_form(stats, risk_free_rate, ridge), False, note)

    def neg_sharpe_batch(W):
        vol = np.sqrt(np.maximum(_variance(W, cov), 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (W @ mu - risk_free_rate) / vol
        return np.where(vol > 0, -s, np.inf)

    def neg_sharpe(v):
        var = float(v @ cov @ v)
        if var <= 0:
            return math.inf
        return -(float(v @ mu) - risk_free_rate) / math.sqrt(var)

    w = _search_long_only(stats, neg_sharpe_batch, neg_sharpe, mc_samples, seed)
    return Weights(stats.symbols, w, True, note)


@dataclass(frozen=True, eq=False)
class Frontier:
    weights: np.ndarray
    returns: np.ndarray
    volatilities: np.ndarray
    sharpe: np.ndarray

    def __len__(self):
        return len(self.returns)


def monte_carlo_frontier(
    stats: AssetStats,
    n_samples: int = DEFAULT_SAMPLES,
    risk_free_rate: float = DEFAULT_RISK_FREE,
    seed: int = DEFAULT_SEED,
) -> Frontier:
    if n_samples < 1:
        raise ParameterError(f"n_samples must be >= 1, got {n_samples}")
    W = sample_simplex(n_samples, len(stats.symbols), seed)
    rets = W @ stats.annual_returns
    vols = np.sqrt(np.maximum(_variance(W, stats.covariance), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        sharpe = np.where(vols > 0, (rets - risk_free_rate) / vols, np.nan)
    return Frontier(W, rets, vols, sharpe)


# --------------------------------------------------------------------------
# allocation and backtest

def _dec(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, (int, np.integer)):
        return Decimal(int(x))
    return Decimal(repr(float(x)))


@dataclass(frozen=True)
class Allocation:
    symbols: tuple[str, ...]
    shares: tuple[int, ...]
    prices: tuple[Decimal, ...]
    budget: Decimal
    spent: Decimal
    residual_cash: Decimal
    weights: tuple[float, ...] = ()

    @property
    def empty(self) -> bool:
        return not any(self.shares)


def allocate_shares(budget, weights, prices, symbols: Sequence[str] | None = None, top_up: bool = True) -> Allocation:
    """Whole-share holdings for a budget split by ``weights``.

    Each asset first gets floor(budget * w / price) shares. With ``top_up``
    the leftover cash then buys single shares of positively weighted assets,
    always the one furthest below its target value, until none is
    affordable. Money is tracked in ``Decimal`` so
    ``spent + residual_cash == budget`` exactly.
    """
    w = _values(weights)
    if symbols is None:
        symbols = getattr(weights, "symbols", None) or tuple(f"A{i}" for i in range(len(w)))
    price_d = [_dec(p) for p in np.ravel(np.asarray(prices, dtype=object))]
    budget_d = _dec(budget)
    if len(price_d) != len(w):
        raise ShapeError(f"{len(price_d)} prices for {len(w)} weights")
    if budget_d <= 0:
        raise ParameterError("budget must be positive")
    if any(p <= 0 for p in price_d):
        raise ParameterError("prices must be positive")
    if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-9:
        raise ParameterError("weights must be non-negative and sum to 1")

    with localcontext() as ctx:
        ctx.prec = 60
        targets = [budget_d * _dec(wi) for wi in w]
        shares = [int((t / p).to_integral_value(rounding=ROUND_FLOOR)) if wi > 0 else 0
                  for t, p, wi in zip(targets, price_d, w)]
        spent = sum((s * p for s, p in zip(shares, price_d)), Decimal(0))
        cash = budget_d - spent
        while top_up:
            best = None
            for i, (p, wi) in enumerate(zip(price_d, w)):
                if wi <= 0 or p > cash:
                    continue
                gap = targets[i] - shares[i] * p
                if best is None or gap > best[0]:
                    best = (gap, i)
            if best is None:
                break
            i = best[1]
            shares[i] += 1
            spent += price_d[i]
            cash -= price_d[i]
    if not any(shares):
        logger.warning("budget %s buys no whole share at the given prices", budget_d)
    return Allocation(tuple(symbols), tuple(shares), tuple(price_d), budget_d, spent, cash, tuple(float(x) for x in w))


@dataclass(frozen=True, eq=False)
class BacktestReport:
    dates: np.ndarray
    values: np.ndarray
    spent: Decimal
    residual_cash: Decimal
    total_return: float
    total_return_pct: float
    max_drawdown_pct: float

    def summary(self) -> dict:
        return {
            "spent": str(self.spent),
            "residual_cash": str(self.residual_cash),
            "initial_value": float(self.values[0]),
            "final_value": float(self.values[-1]),
            "total_return": self.total_return,
            "total_return_pct": self.total_return_pct,
            "max_drawdown_pct": self.max_drawdown_pct,
            "n_days": int(len(self.values)),
        }


def max_drawdown_pct(values) -> float:
    v = np.asarray(values, dtype=float)
    peak = np.maximum.accumulate(v)
    return float(np.max((peak - v) / peak) * 100.0)


def backtest(allocation: Allocation, test_panel: AssetPanel) -> BacktestReport:
    """Buy-and-hold value path; total return is relative to the amount spent."""
    missing = [s for s in allocation.symbols if s not in test_panel.symbols]
    if missing:
        raise DataError(f"test panel lacks symbols {missing}")
    cols = [test_panel.symbols.index(s) for s in allocation.symbols]
    shares = np.array(allocation.shares, dtype=float)
    cash = float(allocation.residual_cash)
    values = test_panel.closes[:, cols] @ shares + cash
    total = float(values[-1] - values[0])
    spent = float(allocation.spent)
    pct = 100.0 * total / spent if spent > 0 else 0.0
    return BacktestReport(test_panel.dates, values, allocation.spent, allocation.residual_cash, total, pct,
                          max_drawdown_pct(values))


# --------------------------------------------------------------------------
# emitters

def _money(x: Decimal) -> str:
    # at least cents, never rounding away precision
    return str(x.quantize(Decimal("0.01")) if x.as_tuple().exponent > -2 else x)


def allocation_to_csv(weights: Weights, allocation: Allocation) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["symbol", "weight", "shares", "price", "spent"])
    for sym, wv, sh, pr in zip(weights.symbols, weights.values, allocation.shares, allocation.prices):
        writer.writerow([sym, repr(float(wv)), sh, _money(pr), _money(sh * pr)])
    return buf.getvalue()


def read_allocation_csv(text: str, budget) -> tuple[Weights, Allocation]:
    rows = list(csv.DictReader(io.StringIO(text)))
    symbols = tuple(r["symbol"] for r in rows)
    w = [float(r["weight"]) for r in rows]
    shares = tuple(int(r["shares"]) for r in rows)
    prices = tuple(Decimal(r["price"]) for r in rows)
    budget_d = _dec(budget)
    spent = sum((s * p for s, p in zip(shares, prices)), Decimal(0))
    weights = Weights(symbols, w, all(x >= 0 for x in w))
    return weights, Allocation(symbols, shares, prices, budget_d, spent, budget_d - spent, tuple(w))


def backtest_to_csv(report: BacktestReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "value"])
    for d, v in zip(report.dates, report.values):
        writer.writerow([str(d), repr(float(v))])
    return buf.getvalue()


def frontier_to_csv(frontier: Frontier, symbols: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample", "return", "volatility", "sharpe", *symbols])
    for i in range(len(frontier)):
        writer.writerow([i, repr(float(frontier.returns[i])), repr(float(frontier.volatilities[i])),
                         repr(float(frontier.sharpe[i])), *(repr(float(x)) for x in frontier.weights[i])])
    return buf.getvalue()


def summary_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)
