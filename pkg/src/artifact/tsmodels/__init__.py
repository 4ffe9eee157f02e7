"""Univariate statistical forecasting models and diagnostics."""

from .arima import ArimaModel, arima_auto_fit, arima_forecast, difference
from .serialize import dumps, loads, model_from_dict, model_to_dict
from .smoothing import (
    DEFAULT_GRID,
    DEFAULT_SEASON_LENGTH,
    HoltModel,
    HoltWintersModel,
    SesModel,
    holt_fit,
    holt_forecast,
    hw_fit,
    hw_forecast,
    seasonal_index,
    ses_fit,
    ses_forecast,
)
from .stattools import AdfResult, DecompositionResult, acf, adf_test, correlogram, decompose, pacf

__all__ = [
    "AdfResult", "ArimaModel", "DEFAULT_GRID", "DEFAULT_SEASON_LENGTH", "DecompositionResult",
    "HoltModel", "HoltWintersModel", "SesModel", "acf", "adf_test", "arima_auto_fit",
    "arima_forecast", "correlogram", "decompose", "difference", "dumps", "holt_fit",
    "holt_forecast", "hw_fit", "hw_forecast", "loads", "model_from_dict", "model_to_dict",
    "pacf", "seasonal_index", "ses_fit", "ses_forecast",
]
