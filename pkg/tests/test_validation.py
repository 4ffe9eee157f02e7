import json

import numpy as np
import pytest

from artifact import tsmodels as T
from artifact import validation as V
from artifact.data import PriceSeries
from artifact.errors import InsufficientDataError, ParameterError, ShapeError


def ses_factory(train, h):
    return T.ses_forecast(T.ses_fit(train), h)


def record_factory(seen):
    def factory(train, h):
        seen.append(train.copy())
        return np.zeros(h)
    return factory


@pytest.mark.parametrize(
    "mode, expected",
    [("sliding", [(0, 3), (1, 4), (2, 5)]), ("rolling", [(0, 3), (0, 4), (0, 5)])],
)
def test_fold_windows_small(mode, expected):
    folds = V.fold_windows(6, V.WindowSpec(mode, 3, 1, 1))
    assert [(a, b) for a, b, _, _ in folds] == expected
    assert [(c, d) for _, _, c, d in folds] == [(3, 4), (4, 5), (5, 6)]


def test_factory_sees_only_training_window():
    seen = []
    y = np.arange(10.0)
    V.walk_forward(y, V.WindowSpec("sliding", 4, 2, 2), record_factory(seen))
    assert [s.tolist() for s in seen] == [[0, 1, 2, 3], [2, 3, 4, 5], [4, 5, 6, 7]]


def test_partial_final_fold_is_flagged():
    folds = V.walk_forward(np.arange(9.0), V.WindowSpec("rolling", 4, 3, 3), lambda tr, h: np.zeros(h))
    assert [len(f.actuals) for f in folds] == [3, 2]
    assert [f.partial for f in folds] == [False, True]
    assert json.loads(V.summary_json(folds, V.WindowSpec("rolling", 4, 3, 3)))["partial_final_fold"]


def test_constant_series_ses_has_zero_error():
    folds = V.walk_forward(np.full(30, 7.0), V.WindowSpec("sliding", 10, 1, 1), ses_factory)
    assert all(p == a for f in folds for p, a in zip(f.predictions, f.actuals))
    assert V.pooled_metrics(folds).rmse == 0.0


def test_threads_give_identical_results():
    y = np.cumsum(np.random.default_rng(0).normal(size=80)) + 50
    spec = V.WindowSpec("sliding", 40, 2, 3)
    assert V.walk_forward(y, spec, ses_factory) == V.walk_forward(y, spec, ses_factory, n_jobs=4)


def test_dates_label_folds():
    s = PriceSeries.from_closes("A", np.arange(1.0, 8.0), start="2021-01-04")
    folds = V.walk_forward(s, V.WindowSpec("sliding", 5, 1, 1), lambda tr, h: tr[-1:])
    assert folds[0].train_range == ("2021-01-04", "2021-01-08")
    assert folds[0].test_range == ("2021-01-11", "2021-01-11")
    assert V.folds_to_csv(folds).splitlines()[1].startswith("0,2021-01-04,2021-01-08,2021-01-11")


def test_bad_specs_and_short_series():
    with pytest.raises(ParameterError):
        V.WindowSpec("expanding")
    with pytest.raises(ParameterError):
        V.WindowSpec(step=0)
    with pytest.raises(InsufficientDataError):
        V.fold_windows(5, V.WindowSpec("sliding", 5, 1, 1))
    with pytest.raises(ShapeError):
        V.walk_forward(np.arange(10.0), V.WindowSpec("sliding", 5, 2, 1), lambda tr, h: [0.0])


def test_metrics_examples():
    perfect = V.evaluate([1.0, 2.0], [1.0, 2.0])
    assert (perfect.rmse, perfect.mae, perfect.mape, perfect.rmse_over_mean) == (0, 0, 0, 0)
    off = V.evaluate(np.full(5, 12.0), np.full(5, 10.0))
    assert off.rmse == pytest.approx(2) and off.mae == pytest.approx(2)
    assert off.rmse_over_mean == pytest.approx(20.0)
    assert off.mape == pytest.approx(20.0)


def test_undefined_ratio_metrics_are_none():
    r = V.evaluate([1.0, -1.0], [0.0, 0.0])
    assert r.mape is None and r.rmse_over_mean is None
    assert V.evaluate([1.0, 1.0], [1.0, -1.0]).rmse_over_mean is None


def test_metric_shape_errors():
    with pytest.raises(ShapeError):
        V.evaluate([1.0], [1.0, 2.0])
    with pytest.raises(ShapeError):
        V.evaluate([], [])
