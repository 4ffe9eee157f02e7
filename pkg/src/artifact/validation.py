"""Rolling and sliding walk-forward evaluation and forecast error metrics."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientDataError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

# fit on a training window, return the next h forecasts
ModelFactory = Callable[[np.ndarray, int], Sequence[float]]


@dataclass(frozen=True)
class WindowSpec:
    mode: str = "sliding"
    train_size: int = 1000
    test_size: int = 1
    step: int = 1

    def __post_init__(self):
        if self.mode not in ("rolling", "sliding"):
            raise ParameterError(f"window mode must be 'rolling' or 'sliding', got {self.mode!r}")
        if self.train_size < 2:
            raise ParameterError(f"train_size must be >= 2, got {self.train_size}")
        if self.test_size < 1:
            raise ParameterError(f"test_size must be >= 1, got {self.test_size}")
        if self.step < 1:
            raise ParameterError(f"step must be >= 1, got {self.step}")


def fold_windows(n: int, spec: WindowSpec) -> list[tuple[int, int, int, int]]:
    """(train_start, train_stop, test_start, test_stop) for every fold."""
    if n < spec.train_size + spec.test_size:
        raise InsufficientDataError(
            f"walk-forward needs {spec.train_size + spec.test_size} observations, got {n}"
        )
    out = []
    i = 0
    while True:
        if spec.mode == "rolling":
            start, stop = 0, spec.train_size + i * spec.step
        else:
            start, stop = i * spec.step, i * spec.step + spec.train_size
        if stop >= n:
            break
        out.append((start, stop, stop, min(stop + spec.test_size, n)))
        i += 1
    return out


@dataclass(frozen=True)
class FoldResult:
    fold_index: int
    train_start: int
    train_stop: int
    train_range: tuple[str, str]
    test_range: tuple[str, str]
    predictions: tuple[float, ...]
    actuals: tuple[float, ...]
    partial: bool = False


def _label(dates, i):
    return str(dates[i]) if dates is not None else str(i)


def walk_forward(series, spec: WindowSpec, model_factory: ModelFactory, dates=None, n_jobs: int = 1) -> list[FoldResult]:
    """Refit ``model_factory`` on each training window and forecast the test window.

    ``series`` may be a :class:`~artifact.data.PriceSeries` (closes are used)
    or a plain sequence. The factory only ever receives the training slice.
    """
    if dates is None:
        dates = getattr(series, "dates", None)
    values = np.asarray(getattr(series, "close", series), dtype=float)
    windows = fold_windows(len(values), spec)

    def run(k):
        a, b, c, d = windows[k]
        train = values[a:b].copy()
        train.setflags(write=False)
        preds = np.asarray(model_factory(train, d - c), dtype=float)
        if preds.shape != (d - c,):
            raise ShapeError(f"fold {k}: model returned {preds.shape} forecasts, expected {d - c}")
        return FoldResult(
            k,
            a,
            b,
            (_label(dates, a), _label(dates, b - 1)),
            (_label(dates, c), _label(dates, d - 1)),
            tuple(float(v) for v in preds),
            tuple(float(v) for v in values[c:d]),
            partial=(d - c) < spec.test_size,
        )

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, range(len(windows))))
    else:
        results = [run(k) for k in range(len(windows))]
    if results and results[-1].partial:
        logger.info("final fold %d is partial (%d of %d test bars)", results[-1].fold_index,
                    len(results[-1].actuals), spec.test_size)
    return results


# --------------------------------------------------------------------------
# metrics

@dataclass(frozen=True)
class MetricReport:
    """Forecast errors; ratio metrics are ``None`` when undefined."""

    rmse: float
    mae: float
    mape: float | None
    rmse_over_mean: float | None
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(predictions, actuals) -> MetricReport:
    pred = np.asarray(predictions, dtype=float).ravel()
    act = np.asarray(actuals, dtype=float).ravel()
    if pred.shape != act.shape:
        raise ShapeError(f"{len(pred)} predictions vs {len(act)} actuals")
    if pred.size == 0:
        raise ShapeError("cannot evaluate an empty forecast")
    err = pred - act
    rmse = math.sqrt(float(np.mean(err**2)))
    mae = float(np.mean(np.abs(err)))
    mape = float(100.0 * np.mean(np.abs(err / act))) if np.all(act != 0) else None
    mean = float(np.mean(act))
    ratio = 100.0 * rmse / mean if mean != 0 else None
    return MetricReport(rmse, mae, mape, ratio, int(pred.size))


def pooled_metrics(folds: Sequence[FoldResult]) -> MetricReport:
    preds = [p for f in folds for p in f.predictions]
    acts = [a for f in folds for a in f.actuals]
    return evaluate(preds, acts)


# --------------------------------------------------------------------------
# emitters

FOLD_COLUMNS = ("fold", "train_start", "train_end", "test_start", "test_end", "step", "prediction", "actual", "error", "partial")


def folds_to_csv(folds: Sequence[FoldResult]) -> str:
    """One row per forecast step (a single row per fold when test_size is 1)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FOLD_COLUMNS)
    for f in folds:
        for j, (p, a) in enumerate(zip(f.predictions, f.actuals), 1):
            writer.writerow([f.fold_index, *f.train_range, *f.test_range, j, repr(p), repr(a), repr(p - a), int(f.partial)])
    return buf.getvalue()


def summary_json(folds: Sequence[FoldResult], spec: WindowSpec, **extra) -> str:
    report = pooled_metrics(folds)
    doc = {
        "window": asdict(spec),
        "n_folds": len(folds),
        "partial_final_fold": bool(folds and folds[-1].partial),
        "metrics": report.to_dict(),
        **extra,
    }
    return json.dumps(doc, indent=2, sort_keys=True)
