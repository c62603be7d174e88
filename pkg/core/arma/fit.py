"""Maximum-likelihood ARMA fitting, AICc order selection and whitening."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from core.arma.likelihood import LOG_2PI, filter_with_model, kalman_innovations, log_likelihood
from core.arma.model import PACF_LIMIT, ArmaModel, ar_from_unconstrained, ma_from_unconstrained
from core.errors import (
    DegenerateSeriesError,
    InvalidArgumentError,
    NoModelError,
    UnsupportedInputError,
)
from core.logkit import get_logger
from core.series.stats import durbin_levinson, sample_acf
from core.series.timeseries import TimeSeries
from core.settings import get_settings

log = get_logger(__name__)

MAX_ITER = 2000
SIMPLEX_TOL = 1e-8
MAX_GRID_ORDER = 5


@dataclass(frozen=True)
class FitReport:
    model: ArmaModel
    residuals: TimeSeries
    loglik: float
    aicc: float
    converged: bool
    iterations: int
    n: int
    include_mean: bool = True

    @property
    def order(self) -> tuple[int, int]:
        return self.model.order

    @property
    def n_params(self) -> int:
        return self.model.p + self.model.q + 1 + int(self.include_mean)


class OrderChoice(NamedTuple):
    p: int
    q: int
    report: FitReport


def aicc(loglik: float, n_params: int, n: int) -> float:
    if n - n_params - 1 <= 0:
        return float("inf")
    return float(-2.0 * loglik + 2.0 * n_params * n / (n - n_params - 1))


class _ProfileLikelihood:
    """-loglik as a function of the unconstrained coefficients, mean and sigma^2 profiled out."""

    def __init__(self, y: np.ndarray, p: int, q: int, include_mean: bool):
        self.y = y
        self.p = p
        self.q = q
        self.include_mean = include_mean
        self.n = y.size
        self.columns = np.column_stack([y, np.ones_like(y)]) if include_mean else y[:, None]

    def unpack(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return ar_from_unconstrained(u[:self.p]), ma_from_unconstrained(u[self.p:])

    def evaluate(self, u: np.ndarray) -> tuple[float, float, float, np.ndarray, np.ndarray]:
        ar, ma = self.unpack(u)
        V, F = kalman_innovations(ar, ma, self.columns)
        if self.include_mean:
            w = 1.0 / F
            mu = float(np.sum(V[:, 0] * V[:, 1] * w) / np.sum(V[:, 1] ** 2 * w))
            e = V[:, 0] - mu * V[:, 1]
        else:
            mu = 0.0
            e = V[:, 0]
        sigma2 = float(np.mean(e * e / F))
        if sigma2 <= 0:
            return float("inf"), mu, sigma2, e, F
        loglik = -0.5 * self.n * (LOG_2PI + np.log(sigma2) + 1.0) - 0.5 * float(np.sum(np.log(F)))
        return -loglik, mu, sigma2, e, F

    def __call__(self, u: np.ndarray) -> float:
        return self.evaluate(u)[0]


def _starting_points(y: np.ndarray, p: int, q: int) -> list[np.ndarray]:
    k = p + q
    alternating = np.array([0.3 if i % 2 == 0 else -0.3 for i in range(k)])
    from_data = np.zeros(k)
    if p:
        rho = sample_acf(TimeSeries(0, y), min(p, y.size - 1)).correlations
        pacf = np.clip(durbin_levinson(rho), -0.95, 0.95)
        from_data[:p] = np.arctanh(pacf / PACF_LIMIT)
    return [np.zeros(k), np.full(k, 0.5), np.full(k, -0.5), from_data, alternating]


def fit(series: TimeSeries, p: int, q: int, include_mean: bool = True) -> FitReport:
    """Exact Gaussian ML fit of ARMA(p, q).

    Coefficients are searched through the partial-autocorrelation bijection
    (tanh onto (-1, 1)), so every candidate is causal and invertible. The mean
    is the exact GLS estimate for the current coefficients and sigma^2 its
    closed form, so only p + q numbers enter the simplex.
    """
    p, q = int(p), int(q)
    if p < 0 or q < 0:
        raise InvalidArgumentError(f"orders must be nonnegative, got ({p}, {q})")
    if not series.is_complete:
        raise UnsupportedInputError(f"series '{series.name}' has missing values; fit needs a complete series")
    y = series.values
    n = y.size
    if n < 10 * (p + q + 1):
        raise InvalidArgumentError(f"ARMA({p},{q}) needs at least {10 * (p + q + 1)} observations, got {n}")
    centre = y.mean() if include_mean else 0.0
    if np.max(np.abs(y - centre)) <= 64 * np.finfo(float).eps * max(np.max(np.abs(y)), 1e-300):
        raise DegenerateSeriesError(f"series '{series.name}' is constant; nothing to fit")

    objective = _ProfileLikelihood(y, p, q, include_mean)
    iterations = 0
    converged = True
    best_u = np.zeros(0)
    if p + q > 0:
        best = None
        for x0 in _starting_points(y, p, q):
            simplex = np.vstack([x0, x0 + 0.5 * np.eye(p + q)])
            res = optimize.minimize(
                objective, x0, method="Nelder-Mead",
                options={"maxiter": MAX_ITER, "xatol": SIMPLEX_TOL, "fatol": 1e-10,
                         "initial_simplex": simplex},
            )
            iterations += int(res.nit)
            if best is None or res.fun < best.fun:
                best = res
        best_u = best.x
        converged = bool(best.success)
        if not converged:
            log.warning("ARMA(%d,%d) fit on '%s' stopped without converging: %s", p, q, series.name, best.message)

    _, mu, sigma2, e, F = objective.evaluate(best_u)
    ar, ma = objective.unpack(best_u)
    model = ArmaModel(tuple(ar), tuple(ma), mu, sigma2)
    residuals = series.with_values(e / np.sqrt(F), name=f"{series.name}_resid")
    loglik = log_likelihood(model, series)
    n_params = p + q + 1 + int(include_mean)
    return FitReport(
        model=model,
        residuals=residuals,
        loglik=loglik,
        aicc=aicc(loglik, n_params, n),
        converged=converged,
        iterations=iterations,
        n=n,
        include_mean=include_mean,
    )


def _try_fit(series: TimeSeries, p: int, q: int, include_mean: bool) -> FitReport | None:
    try:
        return fit(series, p, q, include_mean=include_mean)
    except InvalidArgumentError as exc:
        log.debug("skipping ARMA(%d,%d): %s", p, q, exc)
        return None


def select_order(series: TimeSeries, p_max: int, q_max: int, include_mean: bool = True,
                 max_workers: int | None = None) -> OrderChoice:
    """Fit every (p, q) in the grid and keep the minimum-AICc model.

    Ties go to the smaller p + q, then the smaller p; cells are compared in
    grid order, never in completion order.
    """
    p_max, q_max = int(p_max), int(q_max)
    for label, value in (("p_max", p_max), ("q_max", q_max)):
        if value < 0 or value > MAX_GRID_ORDER:
            raise InvalidArgumentError(f"{label} must be in [0, {MAX_GRID_ORDER}], got {value}")
    cells = [(p, q) for p in range(p_max + 1) for q in range(q_max + 1)]
    workers = max_workers or get_settings().max_workers
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda c: _try_fit(series, c[0], c[1], include_mean), cells))
    else:
        reports = [_try_fit(series, p, q, include_mean) for p, q in cells]

    best_key = None
    choice = None
    for (p, q), report in zip(cells, reports):
        if report is None or not np.isfinite(report.aicc):
            continue
        key = (report.aicc, p + q, p)
        if best_key is None or key < best_key:
            best_key = key
            choice = OrderChoice(p, q, report)
    if choice is None:
        raise NoModelError(
            f"no ARMA order in the (0..{p_max}) x (0..{q_max}) grid could be fitted to "
            f"'{series.name}' ({len(series)} observations)"
        )
    log.debug("selected ARMA(%d,%d) for '%s', AICc %.4f", choice.p, choice.q, series.name, choice.report.aicc)
    return choice


def whiten(series: TimeSeries, report: FitReport) -> TimeSeries:
    """Residuals u_t of `series` under the fitted model, on the data scale."""
    if len(series) != report.n:
        raise InvalidArgumentError(f"series length {len(series)} does not match the fit length {report.n}")
    return filter_with_model(series, report.model)
