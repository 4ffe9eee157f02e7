"""Stock forecasting, classical ML and portfolio construction toolkit.

Subpackages
-----------
data        OHLCV ingestion, calendar alignment, returns and features
tsmodels    exponential smoothing, ARIMA, ADF, ACF/PACF, decomposition
validation  walk-forward harness and error metrics
ml          CART-based ensembles and simple classifiers/regressors
portfolio   mean-variance weights, share allocation and backtests
cli         ``artifact`` command-line entry point
"""

from . import data, ml, portfolio, tsmodels, validation
from .errors import ArtifactError

__all__ = ["ArtifactError", "data", "ml", "portfolio", "tsmodels", "validation"]
__version__ = "0.1.0"
