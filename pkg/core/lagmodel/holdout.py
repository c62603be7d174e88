"""Block holdout evaluation: refit with each block masked, score predictions on it."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core.errors import InvalidArgumentError
from core.lagmodel.transfer import LagSpec, fit_transfer, predict
from core.logkit import get_logger
from core.series.timeseries import TimeSeries

log = get_logger(__name__)

MIN_BLOCK = 5

# builder(train, target_times) -> predictions for target_times
Builder = Callable[[TimeSeries, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BlockScore:
    start: int
    end: int
    rmse: float
    n: int


@dataclass(frozen=True)
class HoldoutReport:
    builder: str
    blocks: tuple[BlockScore, ...]
    pooled_rmse: float
    n: int


class ConstantMeanBuilder:
    """Predicts the training mean everywhere."""

    name = "constant-mean"

    def __call__(self, train: TimeSeries, targets: np.ndarray) -> np.ndarray:
        return np.full(len(targets), float(np.nanmean(train.values)))


class TransferBuilder:
    """Fits a transfer model on the training data and predicts the targets.

    White errors use every observed training year. ARMA errors need a gap-free
    window, so the fit runs on the longest contiguous observed stretch.
    """

    def __init__(self, covariates: list[tuple[TimeSeries, LagSpec]], error_p: int = 0, error_q: int = 0,
                 include_intercept: bool = True, name: str | None = None):
        self.covariates = list(covariates)
        self.error_p = int(error_p)
        self.error_q = int(error_q)
        self.include_intercept = include_intercept
        terms = ",".join(f"{spec.label}{list(spec.offsets)}" for _, spec in self.covariates)
        self.name = name or f"transfer({terms}; ARMA({self.error_p},{self.error_q}))"

    def __call__(self, train: TimeSeries, targets: np.ndarray) -> np.ndarray:
        if self.error_p or self.error_q:
            train = longest_run(train)
        model = fit_transfer(train, self.covariates, self.error_p, self.error_q, self.include_intercept)
        return predict(model, self.covariates, targets).mean.values


def longest_run(series: TimeSeries) -> TimeSeries:
    """Longest stretch without missing values (the earliest one on ties)."""
    obs = ~series.missing_mask
    best_start, best_len, run_start = 0, 0, None
    for i, ok in enumerate(np.append(obs, False)):
        if ok and run_start is None:
            run_start = i
        elif not ok and run_start is not None:
            if i - run_start > best_len:
                best_start, best_len = run_start, i - run_start
            run_start = None
    if best_len == 0:
        raise InvalidArgumentError(f"series '{series.name}' has no observed values")
    t0 = series.start_time + best_start
    return series.window(t0, t0 + best_len - 1)


def _validate_blocks(y: TimeSeries, blocks) -> list[tuple[int, int]]:
    checked = [(int(a), int(b)) for a, b in blocks]
    if not checked:
        raise InvalidArgumentError("at least one holdout block is required")
    for a, b in checked:
        if b - a + 1 < MIN_BLOCK:
            raise InvalidArgumentError(f"block [{a}, {b}] is shorter than {MIN_BLOCK} years")
        if a < y.start_time or b > y.end_time:
            raise InvalidArgumentError(f"block [{a}, {b}] outside [{y.start_time}, {y.end_time}]")
    ordered = sorted(checked)
    for (_, b1), (a2, _) in zip(ordered, ordered[1:]):
        if a2 <= b1:
            raise InvalidArgumentError(f"holdout blocks overlap at year {a2}")
    return checked


def holdout_eval(y: TimeSeries, builder: Builder, blocks, max_workers: int | None = None) -> HoldoutReport:
    """RMSE on each masked block plus the pooled RMSE over every held-out year."""
    checked = _validate_blocks(y, blocks)

    def run(block: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        a, b = block
        i, j = a - y.start_time, b - y.start_time
        masked = np.array(y.values)
        masked[i:j + 1] = np.nan
        targets = np.arange(a, b + 1)
        preds = np.asarray(builder(y.with_values(masked), targets), dtype=float)
        if preds.shape != targets.shape:
            raise InvalidArgumentError(f"builder returned {preds.shape[0]} predictions for {targets.size} years")
        truth = y.values[i:j + 1]
        ok = ~np.isnan(truth)
        return preds[ok] - truth[ok], targets[ok]

    if max_workers and max_workers > 1 and len(checked) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(run, checked))
    else:
        outcomes = [run(block) for block in checked]

    scores = []
    for (a, b), (err, _) in zip(checked, outcomes):
        rmse = float(np.sqrt(np.mean(err ** 2))) if err.size else float("nan")
        scores.append(BlockScore(a, b, rmse, int(err.size)))
    pooled = np.concatenate([err for err, _ in outcomes])
    if pooled.size == 0:
        raise InvalidArgumentError("holdout blocks contain no observed response values")
    name = getattr(builder, "name", getattr(builder, "__name__", "builder"))
    report = HoldoutReport(name, tuple(scores), float(np.sqrt(np.mean(pooled ** 2))), int(pooled.size))
    log.debug("holdout %s: pooled RMSE %.6g over %d years", name, report.pooled_rmse, report.n)
    return report
