from .arima import ArModel, fit_ar, forecast_ar, one_step_ar
from .forest import forest_importance, rfe
from .garch import Garch11, GarchFitError, fit_garch11, forecast_garch, simulate_garch11
from .linear import LinearModel, fit_linear, least_squares, predict_linear
from .var import (
    SingularRegressorError,
    VarModel,
    fit_var,
    forecast_var,
    information_criterion,
    lag_report,
    one_step_var,
    select_lag,
)

__all__ = [
    "ArModel", "Garch11", "GarchFitError", "LinearModel", "SingularRegressorError", "VarModel",
    "fit_ar", "fit_garch11", "fit_linear", "fit_var", "forecast_ar", "forecast_garch",
    "forecast_var", "forest_importance", "information_criterion", "lag_report",
    "least_squares", "one_step_ar", "one_step_var", "predict_linear", "rfe", "select_lag",
    "simulate_garch11",
]
