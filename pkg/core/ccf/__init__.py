from core.ccf.crosscorr import MODES, CcfResult, cross_correlation, prewhitened_ccf, significant_lags

__all__ = ["MODES", "CcfResult", "cross_correlation", "prewhitened_ccf", "significant_lags"]
