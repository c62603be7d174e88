from core.arma.diagnostics import ResidualDiagnostics, outlier_break_proximity, residual_diagnostics
from core.arma.fit import FitReport, OrderChoice, aicc, fit, select_order, whiten
from core.arma.likelihood import (
    arma_autocovariance,
    filter_with_model,
    forecast_errors,
    innovations_log_likelihood,
    log_likelihood,
)
from core.arma.model import ArmaModel, coefficients_to_pacf, pacf_to_coefficients, simulate

__all__ = [
    "ArmaModel",
    "FitReport",
    "OrderChoice",
    "ResidualDiagnostics",
    "aicc",
    "arma_autocovariance",
    "coefficients_to_pacf",
    "filter_with_model",
    "fit",
    "forecast_errors",
    "innovations_log_likelihood",
    "log_likelihood",
    "outlier_break_proximity",
    "pacf_to_coefficients",
    "residual_diagnostics",
    "select_order",
    "simulate",
    "whiten",
]
