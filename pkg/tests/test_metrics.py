import numpy as np
import pytest

from artifact import ml
from artifact.errors import ShapeError, UndefinedMetricError


def pair_count_auc(scores, labels):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    diff = pos[:, None] - neg[None, :]
    return ((diff > 0).sum() + 0.5 * (diff == 0).sum()) / (len(pos) * len(neg))


def test_auc_examples():
    assert ml.auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert ml.auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == 0.0
    assert ml.auc(np.full(6, 0.3), [1, 0, 1, 0, 0, 1]) == 0.5


def test_auc_matches_pair_counting_with_ties():
    rng = np.random.default_rng(0)
    scores = rng.integers(0, 10, 200) / 10
    labels = rng.integers(0, 2, 200)
    assert ml.auc(scores, labels) == pytest.approx(pair_count_auc(scores, labels), abs=1e-12)


def test_roc_curve_shape():
    curve = ml.roc_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert (curve[0].fpr, curve[0].tpr) == (0.0, 0.0)
    assert any(p.fpr == 0.0 and p.tpr == 1.0 for p in curve)
    assert (curve[-1].fpr, curve[-1].tpr) == (1.0, 1.0)
    thresholds = [p.threshold for p in curve]
    assert thresholds == sorted(thresholds, reverse=True)


def test_roc_single_score_is_diagonal():
    curve = ml.roc_curve(np.full(5, 0.4), [1, 0, 1, 0, 0])
    assert [(p.fpr, p.tpr) for p in curve] == [(0.0, 0.0), (1.0, 1.0)]


def test_roc_area_equals_auc():
    rng = np.random.default_rng(1)
    scores = np.round(rng.random(300), 2)
    labels = rng.integers(0, 2, 300)
    assert ml.roc_area(ml.roc_curve(scores, labels)) == pytest.approx(ml.auc(scores, labels), abs=1e-10)


def test_roc_csv_header():
    text = ml.roc_to_csv(ml.roc_curve([0.2, 0.7], [0, 1]))
    assert text.splitlines()[0] == "threshold,tpr,fpr"
    assert text.splitlines()[1].startswith("inf,")


def test_errors():
    with pytest.raises(UndefinedMetricError):
        ml.auc([0.1, 0.2], [1, 1])
    with pytest.raises(ShapeError):
        ml.auc([0.1, 0.2], [1])
