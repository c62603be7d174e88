"""Sample cross-correlation of two annual series, raw or prewhitened.

Lag convention: correlation(h) = corr(y_{t+h}, x_t), so a positive h means the
covariate x leads the response y.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.arma.fit import select_order, whiten
from core.arma.likelihood import filter_with_model
from core.errors import DegenerateSeriesError, InvalidArgumentError
from core.series.stats import Z_95
from core.series.timeseries import TimeSeries, overlap

MODES = ("raw", "prewhitened-x", "prewhitened-both")
MIN_EFFECTIVE = 10


@dataclass(frozen=True)
class CcfResult:
    lags: np.ndarray
    correlations: np.ndarray
    n: int
    bound: float
    mode: str = "raw"
    start_time: int = 0
    selected_order: tuple[int, int] | None = None

    def at(self, lag: int) -> float:
        idx = int(lag) + int(self.lags[-1])
        if idx < 0 or idx >= self.lags.size:
            raise InvalidArgumentError(f"lag {lag} outside +/-{int(self.lags[-1])}")
        return float(self.correlations[idx])

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])


def _aligned(x: TimeSeries, y: TimeSeries, max_lag: int) -> tuple[TimeSeries, TimeSeries]:
    max_lag = int(max_lag)
    if max_lag < 1:
        raise InvalidArgumentError(f"max_lag must be positive, got {max_lag}")
    start, end = overlap(x, y)
    length = end - start + 1
    if length - max_lag < MIN_EFFECTIVE:
        raise InvalidArgumentError(
            f"overlap of {length} years leaves fewer than {MIN_EFFECTIVE} pairs at lag {max_lag}"
        )
    return x.window(start, end), y.window(start, end)


def _centered(values: np.ndarray) -> np.ndarray:
    obs = ~np.isnan(values)
    if obs.sum() < 2:
        raise InvalidArgumentError("need at least 2 observed values")
    return np.where(obs, values - values[obs].mean(), 0.0)


def cross_correlation(x: TimeSeries, y: TimeSeries, max_lag: int) -> CcfResult:
    """corr(y_{t+h}, x_t) for h = -max_lag..max_lag on the overlapping years.

    Divisor n (the overlap length) at every lag, with a constant bound 1.96/sqrt(n).
    """
    xa, ya = _aligned(x, y, max_lag)
    dx = _centered(xa.values)
    dy = _centered(ya.values)
    n = dx.size
    cxx = np.dot(dx, dx) / n
    cyy = np.dot(dy, dy) / n
    if cxx <= 0 or cyy <= 0:
        raise DegenerateSeriesError("cross-correlation needs two non-constant series")
    norm = np.sqrt(cxx * cyy)
    lags = np.arange(-max_lag, max_lag + 1)
    corr = np.empty(lags.size)
    for i, h in enumerate(lags):
        if h >= 0:
            c = np.dot(dy[h:], dx[:n - h]) / n
        else:
            c = np.dot(dy[:n + h], dx[-h:]) / n
        corr[i] = c / norm
    return CcfResult(lags, np.clip(corr, -1.0, 1.0), n, Z_95 / np.sqrt(n), "raw", xa.start_time)


def prewhitened_ccf(x: TimeSeries, y: TimeSeries, max_lag: int, p_max: int = 2, q_max: int = 2,
                    mode: str = "prewhitened-x") -> CcfResult:
    """Fit ARMA to x by AICc, whiten x, then correlate with y.

    `prewhitened-x` correlates the whitened x with the raw y; `prewhitened-both`
    also passes y through x's fitted filter.
    """
    if mode not in MODES:
        raise InvalidArgumentError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "raw":
        return cross_correlation(x, y, max_lag)
    xa, ya = _aligned(x, y, max_lag)
    choice = select_order(xa, p_max, q_max)
    u = whiten(xa, choice.report)
    if mode == "prewhitened-both":
        y_mean = float(np.nanmean(ya.values))
        ya = filter_with_model(ya, choice.report.model.with_mean(y_mean))
    raw = cross_correlation(u, ya, max_lag)
    return CcfResult(raw.lags, raw.correlations, raw.n, raw.bound, mode, raw.start_time,
                     (choice.p, choice.q))


def significant_lags(result: CcfResult) -> list[tuple[int, float]]:
    """Lags with |corr| above the bound, strongest first.

    Ties in |corr| go to the smaller |lag|, then to the negative lag.
    """
    hits = [
        (int(h), float(c))
        for h, c in zip(result.lags, result.correlations)
        if abs(c) > result.bound
    ]
    return sorted(hits, key=lambda hc: (-abs(hc[1]), abs(hc[0]), hc[0]))
