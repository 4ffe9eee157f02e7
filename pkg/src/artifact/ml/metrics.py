"""Threshold-free ranking metrics for binary scores."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import ShapeError, UndefinedMetricError


def _check(scores, labels):
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise ShapeError(f"{len(s)} scores vs {len(y)} labels")
    y = y.astype(bool)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise UndefinedMetricError("AUC needs both positive and negative labels")
    return s, y, n_pos, len(y) - n_pos


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(random positive outscores random negative), ties count 1/2."""
    s, y, n_pos, n_neg = _check(scores, labels)
    ranks = rankdata(s)  # average ranks resolve ties as 1/2
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tpr: float
    fpr: float


def roc_curve(scores, labels) -> list[RocPoint]:
    """ROC points for thresholds at each unique score, highest first.

    The curve starts at (0, 0) with an infinite threshold; a point at
    threshold t counts scores >= t as positive.
    """
    s, y, n_pos, n_neg = _check(scores, labels)
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    # last index of each run of equal scores
    ends = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    points = [RocPoint(float("inf"), 0.0, 0.0)]
    for e in ends:
        points.append(RocPoint(float(s[e]), tp[e] / n_pos, fp[e] / n_neg))
    return points


def roc_area(points) -> float:
    fpr = np.array([p.fpr for p in points])
    tpr = np.array([p.tpr for p in points])
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc_to_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "tpr", "fpr"])
    for p in points:
        writer.writerow([repr(p.threshold), repr(p.tpr), repr(p.fpr)])
    return buf.getvalue()
