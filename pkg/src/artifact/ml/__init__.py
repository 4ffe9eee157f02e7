"""Supervised learners for price regression and direction classification."""

from .metrics import RocPoint, auc, roc_area, roc_curve, roc_to_csv
from .models import (
    CLASSIFIERS,
    DEFAULTS,
    REGRESSORS,
    Dataset,
    FittedModel,
    fit_classifier,
    fit_regressor,
    predict_classes,
    predict_proba,
    predict_regressor,
)

__all__ = [
    "CLASSIFIERS", "DEFAULTS", "Dataset", "FittedModel", "REGRESSORS", "RocPoint", "auc",
    "fit_classifier", "fit_regressor", "predict_classes", "predict_proba", "predict_regressor",
    "roc_area", "roc_curve", "roc_to_csv",
]
