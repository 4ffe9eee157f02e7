"""OHLCV ingestion, trading-calendar repair, train/test split and features.

Series are stored column-wise as read-only numpy arrays; dates are
``datetime64[D]``. Every function here is pure.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BarValidationError,
    ConfigError,
    GapError,
    InsufficientDataError,
    ParameterError,
    RangeError,
    RowError,
    SchemaError,
)

logger = logging.getLogger(__name__)

DEFAULT_SCHEMA = {
    "date": "Date",
    "open": "Open",
    "high": "High",
    "low": "Low",
    "close": "Close",
    "volume": "Volume",
}
PRICE_FIELDS = ("open", "high", "low", "close")


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def to_date(value) -> np.datetime64:
    """Coerce a ``date``, ISO string or ``datetime64`` to ``datetime64[D]``."""
    if isinstance(value, np.datetime64):
        return value.astype("datetime64[D]")
    if isinstance(value, dt.datetime):
        value = value.date()
    if isinstance(value, dt.date):
        return np.datetime64(value, "D")
    return np.datetime64(dt.date.fromisoformat(str(value).strip()), "D")


@dataclass(frozen=True)
class Bar:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: int

    def __post_init__(self):
        check_bar(self.date, self.open, self.high, self.low, self.close, self.volume)


def check_bar(date, open_, high, low, close, volume):
    prices = (open_, high, low, close)
    if not all(np.isfinite(p) and p > 0 for p in prices):
        raise BarValidationError(date, f"prices must be positive and finite, got {prices}")
    if not (low <= high):
        raise BarValidationError(date, f"high {high} < low {low}")
    if not (low <= open_ <= high):
        raise BarValidationError(date, f"open {open_} outside [low, high]")
    if not (low <= close <= high):
        raise BarValidationError(date, f"close {close} outside [low, high]")
    if volume < 0:
        raise BarValidationError(date, f"negative volume {volume}")


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Date-ordered OHLCV bars for one symbol."""

    symbol: str
    dates: np.ndarray
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "dates", _frozen(self.dates, "datetime64[D]"))
        for name in PRICE_FIELDS:
            set_(self, name, _frozen(getattr(self, name), float))
        set_(self, "volume", _frozen(self.volume, np.int64))
        n = len(self.dates)
        for name in PRICE_FIELDS + ("volume",):
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has length {len(getattr(self, name))}, expected {n}")
        if n > 1 and not np.all(np.diff(self.dates).astype(np.int64) > 0):
            raise ValueError(f"{self.symbol}: dates must be strictly increasing")

    @classmethod
    def from_bars(cls, symbol: str, bars: Iterable[Bar]) -> "PriceSeries":
        bars = list(bars)
        return cls(
            symbol,
            [np.datetime64(b.date, "D") for b in bars],
            [b.open for b in bars],
            [b.high for b in bars],
            [b.low for b in bars],
            [b.close for b in bars],
            [b.volume for b in bars],
        )

    @classmethod
    def from_closes(cls, symbol: str, closes, start="2016-01-01", dates=None) -> "PriceSeries":
        """Build a series whose OHLC all equal ``closes`` (handy for tests)."""
        closes = np.asarray(closes, dtype=float)
        if dates is None:
            dates = np.busday_offset(to_date(start), np.arange(len(closes)), roll="forward")
        return cls(symbol, dates, closes, closes, closes, closes, np.zeros(len(closes), dtype=np.int64))

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return self.symbol == other.symbol and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("dates",) + PRICE_FIELDS + ("volume",)
        )

    @property
    def bars(self) -> list[Bar]:
        return [self.bar(i) for i in range(len(self))]

    def bar(self, i: int) -> Bar:
        return Bar(
            self.dates[i].astype(dt.date),
            float(self.open[i]),
            float(self.high[i]),
            float(self.low[i]),
            float(self.close[i]),
            int(self.volume[i]),
        )

    def take(self, index) -> "PriceSeries":
        return PriceSeries(
            self.symbol,
            self.dates[index],
            self.open[index],
            self.high[index],
            self.low[index],
            self.close[index],
            self.volume[index],
        )


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    symbol: str
    dates: np.ndarray
    values: np.ndarray
    kind: str = "simple"

    def __post_init__(self):
        object.__setattr__(self, "dates", _frozen(self.dates, "datetime64[D]"))
        object.__setattr__(self, "values", _frozen(self.values, float))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    dates: np.ndarray
    feature_names: tuple[str, ...]
    rows: np.ndarray
    labels: np.ndarray
    target: str = "next_close"

    def __post_init__(self):
        object.__setattr__(self, "dates", _frozen(self.dates, "datetime64[D]"))
        object.__setattr__(self, "rows", _frozen(self.rows, float))
        object.__setattr__(self, "labels", _frozen(self.labels, float))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.feature_names):
            raise ValueError("rows must be a matrix with one column per feature name")
        if len(self.rows) != len(self.labels) or len(self.rows) != len(self.dates):
            raise ValueError("dates, rows and labels must have equal length")

    def __len__(self) -> int:
        return len(self.rows)


# --------------------------------------------------------------------------
# ingestion

def load_csv(path, schema: Mapping[str, str] | None = None, symbol: str | None = None) -> PriceSeries:
    """Read an OHLCV CSV file into a :class:`PriceSeries` sorted by date.

    ``schema`` maps the logical fields (date, open, high, low, close,
    volume) to header names in the file; unspecified fields keep the
    default ``Date,Open,High,Low,Close,Volume`` names.
    """
    path = Path(path)
    mapping = dict(DEFAULT_SCHEMA)
    if schema:
        mapping.update(schema)
    if symbol is None:
        symbol = path.stem

    records = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for key in ("date",) + PRICE_FIELDS + ("volume",):
            if mapping[key] not in header:
                raise SchemaError(mapping[key], path)
        for row in reader:
            line = reader.line_num
            try:
                date = to_date(row[mapping["date"]])
                prices = [float(row[mapping[k]]) for k in PRICE_FIELDS]
                vol_text = row[mapping["volume"]].strip()
                volume = int(float(vol_text)) if vol_text else 0
            except (TypeError, ValueError) as exc:
                raise RowError(line, str(exc)) from None
            records.append((date, *prices, volume))

    records.sort(key=lambda r: r[0])
    for (d0, *_), (d1, *_) in zip(records, records[1:]):
        if d0 == d1:
            raise BarValidationError(d1, "duplicate date")
    for date, o, h, l, c, v in records:
        check_bar(date, o, h, l, c, v)
    cols = list(zip(*records)) if records else [[]] * 6
    return PriceSeries(symbol, *cols)


def write_csv(series: PriceSeries, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["Date", "Open", "High", "Low", "Close", "Volume"])
        for i in range(len(series)):
            writer.writerow([
                str(series.dates[i]),
                repr(float(series.open[i])),
                repr(float(series.high[i])),
                repr(float(series.low[i])),
                repr(float(series.close[i])),
                int(series.volume[i]),
            ])


def load_calendar(path) -> np.ndarray:
    """Read a trading calendar: one ISO-8601 date per line, ascending."""
    days = []
    with Path(path).open() as fh:
        for line_no, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                days.append(to_date(text))
            except ValueError as exc:
                raise RowError(line_no, str(exc)) from None
    cal = np.array(days, dtype="datetime64[D]")
    if len(cal) > 1 and not np.all(np.diff(cal).astype(np.int64) > 0):
        raise ParameterError(f"calendar {path} is not strictly ascending")
    return cal


# --------------------------------------------------------------------------
# calendar and splitting

def align_calendar(series: PriceSeries, calendar: Sequence) -> PriceSeries:
    """Reindex ``series`` onto ``calendar`` with forward fill.

    Missing days repeat the most recent prior bar's OHLC with zero volume.
    Bars on dates outside the calendar are dropped.
    """
    cal = np.asarray([to_date(d) for d in calendar], dtype="datetime64[D]")
    if len(cal) == 0:
        raise ParameterError("calendar is empty")
    if len(series) == 0 or cal[0] < series.dates[0]:
        first = series.dates[0] if len(series) else "no data"
        raise GapError(f"{series.symbol}: calendar day {cal[0]} precedes first observation ({first})")

    # index of the most recent bar at or before each calendar day
    src = np.searchsorted(series.dates, cal, side="right") - 1
    exact = series.dates[src] == cal
    volume = np.where(exact, series.volume[src], 0)
    n_filled = int((~exact).sum())
    if n_filled:
        logger.debug("%s: forward-filled %d calendar days", series.symbol, n_filled)
    return PriceSeries(
        series.symbol,
        cal,
        series.open[src],
        series.high[src],
        series.low[src],
        series.close[src],
        volume,
    )


def split_train_test(series: PriceSeries, split_date) -> tuple[PriceSeries, PriceSeries]:
    """Train gets every bar dated on or before ``split_date``; test the rest."""
    split = to_date(split_date)
    if len(series) < 2 or not (series.dates[0] <= split < series.dates[-1]):
        raise RangeError(
            f"split date {split} must lie within [{series.dates[0] if len(series) else '-'}, "
            f"{series.dates[-1] if len(series) else '-'})"
        )
    cut = int(np.searchsorted(series.dates, split, side="right"))
    return series.take(slice(0, cut)), series.take(slice(cut, None))


def concat(first: PriceSeries, second: PriceSeries) -> PriceSeries:
    return PriceSeries(
        first.symbol,
        np.concatenate([first.dates, second.dates]),
        *(np.concatenate([getattr(first, f), getattr(second, f)]) for f in PRICE_FIELDS + ("volume",)),
    )


# --------------------------------------------------------------------------
# returns and indicators

def returns(series: PriceSeries, kind: str = "simple") -> ReturnSeries:
    """Daily close-to-close returns; ``kind`` is ``simple`` or ``log``."""
    if len(series) < 2:
        raise InsufficientDataError(f"{series.symbol}: need at least 2 bars for returns, got {len(series)}")
    ratio = series.close[1:] / series.close[:-1]
    if kind == "simple":
        values = ratio - 1.0
    elif kind == "log":
        values = np.log(ratio)
    else:
        raise ParameterError(f"unknown return kind {kind!r}")
    return ReturnSeries(series.symbol, series.dates[1:], values, kind)


def _closes(series) -> np.ndarray:
    if isinstance(series, PriceSeries):
        return series.close
    return np.asarray(series, dtype=float)


def rsi(series, period: int = 14) -> np.ndarray:
    """Relative Strength Index with simple trailing averages.

    Returns a column aligned with the input; entries before index
    ``period`` are NaN.
    """
    close = _closes(series)
    n = len(close)
    if period <= 0 or period >= n:
        raise ParameterError(f"RSI period must be in [1, {n - 1}], got {period}")
    change = np.diff(close)
    gain = np.clip(change, 0, None)
    loss = np.clip(-change, 0, None)
    kernel = np.ones(period) / period
    avg_gain = np.convolve(gain, kernel, mode="valid")
    avg_loss = np.convolve(loss, kernel, mode="valid")

    out = np.full(n, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss)
    value = np.where(avg_loss == 0, 100.0, value)
    value = np.where(avg_gain == 0, 0.0, value)
    # flat window: no gains and no losses
    value = np.where((avg_gain == 0) & (avg_loss == 0), 50.0, value)
    out[period:] = value
    return out


def moving_average(series, window: int) -> np.ndarray:
    """Trailing mean of close; NaN before index ``window - 1``."""
    close = _closes(series)
    n = len(close)
    if window <= 0 or window > n:
        raise ParameterError(f"moving-average window must be in [1, {n}], got {window}")
    out = np.full(n, np.nan)
    csum = np.concatenate([[0.0], np.cumsum(close)])
    out[window - 1:] = (csum[window:] - csum[:-window]) / window
    if window == 1:
        out[:] = close
    return out


@dataclass(frozen=True)
class FeatureConfig:
    """Which features :func:`build_dataset` emits.

    ``return_lags`` of k means the simple return ending k-1 days before the
    row date, so lag 1 is the return into the row date itself.
    """

    columns: tuple[str, ...] = ("close", "volume")
    return_lags: tuple[int, ...] = (1, 2, 3, 4, 5)
    rsi_period: int | None = 14
    ma_windows: tuple[int, ...] = (5, 10, 20)

    def is_empty(self) -> bool:
        return not (self.columns or self.return_lags or self.rsi_period or self.ma_windows)

    def warmup(self) -> int:
        """Number of leading rows without every feature defined."""
        need = [0]
        need += [lag for lag in self.return_lags]
        if self.rsi_period:
            need.append(self.rsi_period)
        need += [w - 1 for w in self.ma_windows]
        return max(need)


TARGETS = ("next_close", "next_direction")


def build_dataset(
    series: PriceSeries,
    feature_config: FeatureConfig | None = None,
    target: str = "next_close",
) -> FeatureMatrix:
    """Assemble a lookahead-free feature matrix with one-day-ahead labels."""
    cfg = feature_config or FeatureConfig()
    if cfg.is_empty():
        raise ConfigError("feature configuration selects no features")
    if target not in TARGETS:
        raise ConfigError(f"unknown target {target!r}; expected one of {TARGETS}")
    n = len(series)
    warm = cfg.warmup()
    if n < warm + 2:
        raise InsufficientDataError(
            f"{series.symbol}: {n} bars is too short for warm-up {warm} plus a next-day label"
        )

    names: list[str] = []
    cols: list[np.ndarray] = []
    for col in cfg.columns:
        if col not in PRICE_FIELDS + ("volume",):
            raise ConfigError(f"unknown base feature {col!r}")
        names.append(col)
        cols.append(np.asarray(getattr(series, col), dtype=float))
    if cfg.return_lags:
        ret = np.concatenate([[np.nan], series.close[1:] / series.close[:-1] - 1.0])
        for lag in cfg.return_lags:
            if lag < 1:
                raise ConfigError(f"return lag must be >= 1, got {lag}")
            shifted = np.full(n, np.nan)
            shifted[lag - 1:] = ret[: n - lag + 1]
            names.append(f"ret_lag{lag}")
            cols.append(shifted)
    if cfg.rsi_period:
        names.append(f"rsi{cfg.rsi_period}")
        cols.append(rsi(series, cfg.rsi_period))
    for w in cfg.ma_windows:
        names.append(f"ma{w}")
        cols.append(moving_average(series, w))

    X = np.column_stack(cols)[:-1]
    close = series.close
    if target == "next_close":
        y = close[1:]
    else:
        y = (close[1:] > close[:-1]).astype(float)
    keep = np.all(np.isfinite(X), axis=1)
    return FeatureMatrix(series.dates[:-1][keep], names, X[keep], y[keep], target)
