from core.simulate.fixtures import (
    FactorSystem,
    RegressionSystem,
    independent_pair,
    lagged_factor_panel,
    lagged_regression,
    piecewise_ar,
    signal_plus_noise,
)

__all__ = [
    "FactorSystem",
    "RegressionSystem",
    "independent_pair",
    "lagged_factor_panel",
    "lagged_regression",
    "piecewise_ar",
    "signal_plus_noise",
]
