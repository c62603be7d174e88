"""Piecewise-AR segmentation by minimum description length.

Code length of a segmentation with m breaks, segment lengths n_j and AR orders p_j:

    ln(m + 1) + (m + 1) ln n
      + sum_j [ ln max(p_j, 1) + (p_j + 2)/2 ln n_j + n_j/2 ln(2 pi sigma_j^2) ]

sigma_j^2 is the conditional least-squares innovation variance of a mean-corrected
AR(p_j) fit on segment j. The minimiser is found exactly by dynamic programming
over all breakpoint placements.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.errors import DegenerateSeriesError, InvalidArgumentError, UnsupportedInputError
from core.logkit import get_logger
from core.series.timeseries import TimeSeries

log = get_logger(__name__)

MAX_LENGTH = 10_000
MAX_BREAKS = 10
VAR_FLOOR = np.finfo(float).tiny
LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class SegmentFit:
    start: int
    end: int
    order: int
    ar: tuple[float, ...]
    mean: float
    variance: float

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Segmentation:
    breakpoints: tuple[int, ...]
    segments: tuple[SegmentFit, ...]
    mdl: float
    n: int
    start_time: int = 0

    @property
    def m(self) -> int:
        return len(self.breakpoints)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(s.order for s in self.segments)

    @property
    def break_times(self) -> tuple[int, ...]:
        return tuple(self.start_time + b for b in self.breakpoints)


def fit_segment_ar(values: np.ndarray, order: int) -> tuple[np.ndarray, float, float]:
    """Conditional least-squares AR(order) on the mean-corrected values: (coefs, mean, sigma^2)."""
    x = np.asarray(values, dtype=float)
    n_j = x.size
    if n_j <= order + 1:
        raise InvalidArgumentError(f"segment of length {n_j} is too short for AR({order})")
    mean = float(x.mean())
    d = x - mean
    if order == 0:
        return np.zeros(0), mean, max(float(np.mean(d * d)), VAR_FLOOR)
    target = d[order:]
    design = np.column_stack([d[order - i:n_j - i] for i in range(1, order + 1)])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ coef
    return coef, mean, max(float(np.dot(resid, resid)) / (n_j - order), VAR_FLOOR)


def _segment_code_length(n_j, order: int, sigma2):
    return (np.log(max(order, 1)) + 0.5 * (order + 2) * np.log(n_j)
            + 0.5 * n_j * (LOG_2PI + np.log(sigma2)))


def _complete_values(series: TimeSeries) -> np.ndarray:
    if not series.is_complete:
        raise UnsupportedInputError(f"series '{series.name}' has missing values; segmentation needs a complete series")
    return series.values


def _validate_layout(n: int, breakpoints, orders) -> tuple[list[int], list[int]]:
    bps = [int(b) for b in breakpoints]
    ords = [int(p) for p in orders]
    if len(ords) != len(bps) + 1:
        raise InvalidArgumentError(f"{len(bps)} breakpoints need {len(bps) + 1} orders, got {len(ords)}")
    if any(p < 0 for p in ords):
        raise InvalidArgumentError(f"orders must be nonnegative, got {ords}")
    bounds = [0] + bps + [n]
    for j in range(len(ords)):
        if bounds[j + 1] <= bounds[j]:
            raise InvalidArgumentError(f"breakpoints must be strictly increasing and interior, got {bps}")
        if bounds[j + 1] - bounds[j] <= ords[j] + 1:
            raise InvalidArgumentError(
                f"segment {j} [{bounds[j]}, {bounds[j + 1]}) is too short for AR({ords[j]})"
            )
    return bps, ords


def mdl_score(series: TimeSeries, breakpoints, orders) -> float:
    x = _complete_values(series)
    n = x.size
    bps, ords = _validate_layout(n, breakpoints, orders)
    bounds = [0] + bps + [n]
    m = len(bps)
    total = np.log(m + 1) + (m + 1) * np.log(n)
    for j, p in enumerate(ords):
        seg = x[bounds[j]:bounds[j + 1]]
        _, _, sigma2 = fit_segment_ar(seg, p)
        total += _segment_code_length(seg.size, p, sigma2)
    return float(total)


class _MomentTables:
    """Prefix sums that give every segment's lagged Gram matrix in O(p^2)."""

    def __init__(self, z: np.ndarray, max_order: int):
        self.n = z.size
        self.s1 = np.concatenate([[0.0], np.cumsum(z)])
        self.lagged = [
            np.concatenate([[0.0], np.cumsum(z[:self.n - d] * z[d:])])
            for d in range(max_order + 1)
        ]

    def code_lengths(self, s: int, ends: np.ndarray, order: int) -> np.ndarray:
        n_j = (ends - s).astype(float)
        mean = (self.s1[ends] - self.s1[s]) / n_j
        if order == 0:
            rss = self.lagged[0][ends] - self.lagged[0][s] - n_j * mean * mean
            rows = n_j
        else:
            rows = n_j - order
            lo = s + order
            sums = [self.s1[ends - i] - self.s1[lo - i] for i in range(order + 1)]
            gram = np.empty((ends.size, order + 1, order + 1))
            for i in range(order + 1):
                for j in range(i, order + 1):
                    q = self.lagged[j - i]
                    cross = q[ends - j] - q[lo - j]
                    val = cross - mean * (sums[i] + sums[j]) + rows * mean * mean
                    gram[:, i, j] = val
                    gram[:, j, i] = val
            A = gram[:, 1:, 1:]
            b = gram[:, 1:, :1]
            try:
                coef = np.linalg.solve(A, b)
            except np.linalg.LinAlgError:
                coef = np.linalg.pinv(A) @ b
            rss = gram[:, 0, 0] - np.sum(b[:, :, 0] * coef[:, :, 0], axis=1)
        sigma2 = np.maximum(rss / rows, VAR_FLOOR)
        return _segment_code_length(n_j, order, sigma2)


def segment(series: TimeSeries, max_breaks: int = 4, max_order: int = 2, min_seg_len: int = 10) -> Segmentation:
    """Exact MDL-optimal piecewise-AR segmentation.

    Ties go to fewer breaks, then to the lexicographically smallest breakpoints.
    """
    x = _complete_values(series)
    n = x.size
    max_breaks, max_order, min_seg_len = int(max_breaks), int(max_order), int(min_seg_len)
    if n > MAX_LENGTH:
        raise InvalidArgumentError(f"segmentation handles at most {MAX_LENGTH} observations, got {n}")
    if not 0 <= max_breaks <= MAX_BREAKS:
        raise InvalidArgumentError(f"max_breaks must be in [0, {MAX_BREAKS}], got {max_breaks}")
    if max_order < 0:
        raise InvalidArgumentError(f"max_order must be nonnegative, got {max_order}")
    if min_seg_len < max_order + 2:
        raise InvalidArgumentError(f"min_seg_len must be at least max_order + 2 = {max_order + 2}, got {min_seg_len}")
    if n < min_seg_len:
        raise InvalidArgumentError(f"series of length {n} is shorter than min_seg_len {min_seg_len}")
    sd = float(np.std(x))
    if sd <= 64 * np.finfo(float).eps * max(float(np.max(np.abs(x))), 1e-300):
        raise DegenerateSeriesError(f"series '{series.name}' is constant; nothing to segment")

    # only score differences matter, so work on the standardized series
    tables = _MomentTables((x - x.mean()) / sd, max_order)
    layers = max_breaks + 1
    best = np.full((layers + 1, n + 1), np.inf)
    best[0, n] = 0.0
    next_end = np.full((layers + 1, n + 1), -1, dtype=int)
    for s in range(n - min_seg_len, -1, -1):
        ends = np.arange(s + min_seg_len, n + 1)
        cost = tables.code_lengths(s, ends, 0)
        for order in range(1, max_order + 1):
            cost = np.minimum(cost, tables.code_lengths(s, ends, order))
        for k in range(1, layers + 1):
            cand = cost + best[k - 1, ends]
            idx = int(np.argmin(cand))
            best[k, s] = cand[idx]
            next_end[k, s] = ends[idx]

    chosen_m, chosen_total = 0, np.inf
    for m in range(max_breaks + 1):
        total = np.log(m + 1) + (m + 1) * np.log(n) + best[m + 1, 0]
        if total < chosen_total:
            chosen_m, chosen_total = m, total

    breakpoints = []
    s, k = 0, chosen_m + 1
    while k > 0:
        e = int(next_end[k, s])
        if e < n:
            breakpoints.append(e)
        s, k = e, k - 1

    bounds = [0] + breakpoints + [n]
    fits = []
    for j in range(len(bounds) - 1):
        seg = x[bounds[j]:bounds[j + 1]]
        scored = []
        for order in range(max_order + 1):
            coef, mean, sigma2 = fit_segment_ar(seg, order)
            scored.append((_segment_code_length(seg.size, order, sigma2), order, coef, mean, sigma2))
        _, order, coef, mean, sigma2 = min(scored, key=lambda item: (item[0], item[1]))
        fits.append(SegmentFit(bounds[j], bounds[j + 1], order, tuple(float(c) for c in coef), mean, sigma2))
    orders = [f.order for f in fits]
    mdl = mdl_score(series, breakpoints, orders)
    log.debug("segmentation of '%s': breaks %s, orders %s, MDL %.4f", series.name, breakpoints, orders, mdl)
    return Segmentation(tuple(breakpoints), tuple(fits), mdl, n, series.start_time)
