"""Residual checks: robust outliers, a late-sample variance change, portmanteau."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from core.errors import DegenerateSeriesError, InvalidArgumentError
from core.series.stats import LjungBoxResult, ljung_box
from core.series.timeseries import TimeSeries

MAD_SCALE = 1.4826
OUTLIER_Z = 3.0
MIN_LENGTH = 30


@dataclass(frozen=True)
class ResidualDiagnostics:
    outlier_times: tuple[int, ...]
    outlier_zscores: tuple[float, ...]
    robust_scale: float
    variance_ratio: float
    variance_pvalue: float
    split_time: int
    ljung_box: LjungBoxResult


def residual_diagnostics(residuals: TimeSeries, z_threshold: float = OUTLIER_Z,
                         portmanteau_lags: int | None = None) -> ResidualDiagnostics:
    """Outliers by |robust z| > 3 and the last-third vs first-two-thirds variance ratio.

    Robust z uses the median and MAD x 1.4826. The ratio is tested against an
    F distribution, two-sided.
    """
    n = len(residuals)
    if n < MIN_LENGTH:
        raise InvalidArgumentError(f"residual diagnostics need at least {MIN_LENGTH} values, got {n}")
    x = residuals.values
    obs = ~np.isnan(x)
    centre = float(np.median(x[obs]))
    scale = MAD_SCALE * float(np.median(np.abs(x[obs] - centre)))
    if scale <= 0:
        scale = float(np.std(x[obs]))
    if scale <= 0:
        raise DegenerateSeriesError("residual series is constant")
    z = (x - centre) / scale
    hits = np.flatnonzero(obs & (np.abs(np.nan_to_num(z)) > z_threshold))

    split = n - n // 3
    first = x[:split][obs[:split]]
    last = x[split:][obs[split:]]
    v_first = float(np.var(first, ddof=1))
    v_last = float(np.var(last, ddof=1))
    if v_first <= 0:
        raise DegenerateSeriesError("first two thirds of the residuals are constant")
    ratio = v_last / v_first
    dist = stats.f(last.size - 1, first.size - 1)
    pvalue = float(min(1.0, 2.0 * min(dist.cdf(ratio), dist.sf(ratio))))

    lags = portmanteau_lags or min(20, n // 5)
    return ResidualDiagnostics(
        outlier_times=tuple(int(residuals.start_time + i) for i in hits),
        outlier_zscores=tuple(float(z[i]) for i in hits),
        robust_scale=scale,
        variance_ratio=ratio,
        variance_pvalue=pvalue,
        split_time=int(residuals.start_time + split),
        ljung_box=ljung_box(residuals, lags),
    )


def outlier_break_proximity(outlier_times, break_times, window: int = 2) -> list[tuple[int, int, int]]:
    """(outlier_time, break_time, distance) for every pair at most `window` years apart."""
    pairs = []
    for t in outlier_times:
        for b in break_times:
            if abs(int(t) - int(b)) <= window:
                pairs.append((int(t), int(b), int(t) - int(b)))
    return sorted(pairs, key=lambda item: (abs(item[2]), item[0], item[1]))
