"""Synthetic systems with known answers, used by the `simulate` subcommand and the tests.

Every generator is a pure function of its seed. Independent parts of one
system draw from separate child streams of `numpy.random.SeedSequence(seed)`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from core.arma.model import BURN_IN, ArmaModel, simulate
from core.errors import InvalidArgumentError
from core.pca.panel import ProxyPanel
from core.series.timeseries import TimeSeries

FACTOR_AR = (0.6, 0.2)


def _streams(seed: int, count: int) -> list[np.random.SeedSequence]:
    if int(seed) < 0:
        raise InvalidArgumentError(f"seed must be nonnegative, got {seed}")
    return np.random.SeedSequence(int(seed)).spawn(count)


def signal_plus_noise(seed: int, n: int = 150, step_sd: float = 0.02, noise_sd: float = 1.0,
                      start_time: int = 1850) -> TimeSeries:
    """Slow random walk plus white noise; its first difference is close to an MA(1) with theta = -1."""
    walk_seq, noise_seq = _streams(seed, 2)
    walk = np.cumsum(step_sd * np.random.default_rng(walk_seq).standard_normal(n))
    noise = noise_sd * np.random.default_rng(noise_seq).standard_normal(n)
    return TimeSeries(start_time, walk + noise, "temperature")


@dataclass(frozen=True, eq=False)
class FactorSystem:
    response: TimeSeries
    panel: ProxyPanel
    factor: TimeSeries
    loadings: np.ndarray
    lag: int


def lagged_factor_panel(seed: int, n: int = 150, n_proxies: int = 50, lag: int = 14,
                        coefficient: float = 0.5, noise_sd: float = 0.5,
                        start_time: int = 1850) -> FactorSystem:
    """Panel driven by one AR(2) factor, with a response that follows the factor `lag` years later.

    proxy_j(t) = loading_j * f(t) + N(0, 1), loading_j ~ U(0.5, 1.5)
    response(t) = coefficient * f(t - lag) + N(0, noise_sd^2)
    """
    factor_seq, load_seq, proxy_seq, resp_seq = _streams(seed, 4)
    f = simulate(ArmaModel(FACTOR_AR), n + lag, factor_seq, name="factor", start_time=start_time - lag)
    loadings = np.random.default_rng(load_seq).uniform(0.5, 1.5, n_proxies)
    f_now = f.values[lag:]
    noise = np.random.default_rng(proxy_seq).standard_normal((n, n_proxies))
    panel = ProxyPanel(start_time, tuple(f"proxy{j:03d}" for j in range(n_proxies)),
                       np.outer(f_now, loadings) + noise)
    y = coefficient * f.values[:n] + noise_sd * np.random.default_rng(resp_seq).standard_normal(n)
    return FactorSystem(TimeSeries(start_time, y, "temperature"), panel, f.window(start_time, start_time + n - 1),
                        loadings, lag)


@dataclass(frozen=True, eq=False)
class RegressionSystem:
    response: TimeSeries
    covariate: TimeSeries
    lag: int
    coefficient: float
    intercept: float
    errors: TimeSeries


def lagged_regression(seed: int, n: int = 200, lag: int = 3, coefficient: float = 2.0,
                      intercept: float = 0.0, error_model: ArmaModel | None = None,
                      start_time: int = 0) -> RegressionSystem:
    """response(t) = intercept + coefficient * x(t - lag) + e(t), x white over [start - lag, end].

    e is white with unit variance unless an ARMA `error_model` is given.
    """
    x_seq, e_seq = _streams(seed, 2)
    x = TimeSeries(start_time - lag, np.random.default_rng(x_seq).standard_normal(n + lag), "x")
    e = simulate(error_model or ArmaModel(), n, e_seq, name="errors", start_time=start_time)
    y = intercept + coefficient * x.values[:n] + e.values
    return RegressionSystem(TimeSeries(start_time, y, "y"), x, lag, coefficient, intercept, e)


def piecewise_ar(seed: int, n: int = 1024, break_at: int = 512, phis: tuple[float, float] = (0.7, -0.7),
                 start_time: int = 0) -> TimeSeries:
    """AR(1) whose coefficient switches at `break_at`; one noise stream, continuous path."""
    if not 0 < break_at < n:
        raise InvalidArgumentError(f"break_at must be inside (0, {n}), got {break_at}")
    z = np.random.default_rng(_streams(seed, 1)[0]).standard_normal(BURN_IN + n)
    first = signal.lfilter([1.0], [1.0, -phis[0]], z[:BURN_IN + break_at])
    zi = signal.lfiltic([1.0], [1.0, -phis[1]], [first[-1]])
    second, _ = signal.lfilter([1.0], [1.0, -phis[1]], z[BURN_IN + break_at:], zi=zi)
    return TimeSeries(start_time, np.concatenate([first[BURN_IN:], second]), "piecewise")


def independent_pair(seed: int, n: int = 150, phi: float = 0.9) -> tuple[TimeSeries, TimeSeries]:
    """Persistent AR(1) x and white y, unrelated by construction."""
    x_seq, y_seq = _streams(seed, 2)
    x = simulate(ArmaModel((phi,)), n, x_seq, name="x")
    y = simulate(ArmaModel(), n, y_seq, name="y")
    return x, y
