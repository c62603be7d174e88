"""Differencing, moments and sample (partial) autocorrelation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats
from statsmodels.stats.diagnostic import acorr_ljungbox
from statsmodels.tsa.stattools import levinson_durbin, q_stat

from core.errors import DegenerateSeriesError, EmptySeriesError, InvalidArgumentError
from core.series.timeseries import TimeSeries

Z_95 = 1.96


@dataclass(frozen=True)
class AcfResult:
    lags: np.ndarray
    correlations: np.ndarray
    n: int
    bound: float
    partial: bool = False

    def at(self, lag: int) -> float:
        return float(self.correlations[int(lag)])

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])

    def exceedances(self, start_lag: int = 1) -> np.ndarray:
        """Lags >= start_lag whose |correlation| exceeds the bound."""
        sel = self.lags >= start_lag
        hits = np.abs(self.correlations[sel]) > self.bound
        return self.lags[sel][hits]


@dataclass(frozen=True)
class SeriesSummary:
    mean: float
    variance: float
    min: float
    max: float
    missing: int
    n_observed: int


@dataclass(frozen=True)
class LjungBoxResult:
    statistic: float
    lags: int
    dof: int
    pvalue: float


def difference(series: TimeSeries, lag: int = 1) -> TimeSeries:
    """y[t+lag] - y[t]; shorter by `lag`, missing wherever either side is missing."""
    lag = int(lag)
    if lag < 1:
        raise InvalidArgumentError(f"lag must be a positive integer, got {lag}")
    if len(series) <= lag:
        raise InvalidArgumentError(f"series of length {len(series)} is too short for lag {lag}")
    v = series.values
    return TimeSeries(series.start_time + lag, v[lag:] - v[:-lag], series.name)


def linear_filter(series: TimeSeries, coefficients) -> TimeSeries:
    """sum_k c[k] * y[t-k]; output starts len(c)-1 steps after the input."""
    c = np.asarray(coefficients, dtype=float).reshape(-1)
    d = c.size - 1
    if d < 0:
        raise InvalidArgumentError("filter needs at least one coefficient")
    if len(series) <= d:
        raise InvalidArgumentError(f"series of length {len(series)} is too short for a filter of order {d}")
    v = series.values
    n_out = len(series) - d
    out = np.zeros(n_out)
    for k, ck in enumerate(c):
        out = out + ck * v[d - k:d - k + n_out]
    return TimeSeries(series.start_time + d, out, series.name)


def _centered(series: TimeSeries) -> tuple[np.ndarray, int]:
    mask = series.missing_mask
    n = int((~mask).sum())
    if n < 2:
        raise InvalidArgumentError("need at least 2 non-missing values")
    x = series.values
    mean = x[~mask].mean()
    d = np.where(mask, 0.0, x - mean)
    return d, n


def _autocovariances(d: np.ndarray, n: int, max_lag: int) -> np.ndarray:
    # divisor n at every lag keeps the sequence nonnegative definite
    return np.array([np.dot(d[h:], d[:d.size - h]) / n for h in range(max_lag + 1)])


def sample_acf(series: TimeSeries, max_lag: int) -> AcfResult:
    max_lag = int(max_lag)
    if max_lag < 1:
        raise InvalidArgumentError(f"max_lag must be positive, got {max_lag}")
    if max_lag >= len(series):
        raise InvalidArgumentError(f"max_lag {max_lag} must be below the series length {len(series)}")
    d, n = _centered(series)
    gamma = _autocovariances(d, n, max_lag)
    scale = float(np.max(np.abs(series.values[~series.missing_mask])))
    if gamma[0] <= (64 * np.finfo(float).eps * scale) ** 2:
        raise DegenerateSeriesError("series is constant; autocorrelation undefined")
    rho = np.clip(gamma / gamma[0], -1.0, 1.0)
    rho[0] = 1.0
    return AcfResult(np.arange(max_lag + 1), rho, n, Z_95 / np.sqrt(n))


def durbin_levinson(rho: np.ndarray) -> np.ndarray:
    """Partial autocorrelations at lags 1..K from autocorrelations at lags 0..K."""
    rho = np.asarray(rho, dtype=float)
    K = rho.size - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        _, _, pacf, _, _ = levinson_durbin(rho, nlags=K, isacov=True)
    # a perfectly predictable prefix leaves zero prediction variance
    return np.nan_to_num(pacf[1:], nan=0.0, posinf=0.0, neginf=0.0)


def sample_pacf(series: TimeSeries, max_lag: int) -> AcfResult:
    acf = sample_acf(series, max_lag)
    pacf = np.concatenate([[1.0], np.clip(durbin_levinson(acf.correlations), -1.0, 1.0)])
    return AcfResult(acf.lags, pacf, acf.n, acf.bound, partial=True)


def summary_stats(series: TimeSeries) -> SeriesSummary:
    mask = series.missing_mask
    obs = series.values[~mask]
    if obs.size == 0:
        raise EmptySeriesError("series has no observed values")
    mean = float(obs.mean())
    return SeriesSummary(
        mean=mean,
        variance=float(np.mean((obs - mean) ** 2)),
        min=float(obs.min()),
        max=float(obs.max()),
        missing=int(mask.sum()),
        n_observed=int(obs.size),
    )


def ljung_box(series: TimeSeries, lags: int = 20, fitted_params: int = 0) -> LjungBoxResult:
    """Ljung-Box Q over lags 1..lags, chi-square on lags - fitted_params dof.

    Complete series go straight to statsmodels; series with gaps use the
    pairwise-deletion ACF.
    """
    acf = sample_acf(series, lags)
    dof = int(lags - fitted_params)
    if series.is_complete:
        table = acorr_ljungbox(series.values, lags=[lags], model_df=fitted_params, return_df=True)
        q, pvalue = float(table["lb_stat"].iloc[0]), float(table["lb_pvalue"].iloc[0])
    else:
        qs, _ = q_stat(acf.correlations[1:], acf.n)
        q = float(qs[-1])
        pvalue = float(stats.chi2.sf(q, dof)) if dof > 0 else float("nan")
    return LjungBoxResult(statistic=q, lags=int(lags), dof=dof, pvalue=pvalue)
