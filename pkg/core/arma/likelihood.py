"""Exact Gaussian ARMA likelihood.

The state-space route (Kalman filter with a stationary initial covariance) is
what fitting uses; the innovations algorithm is an independent route kept for
cross-checks.
"""
from __future__ import annotations

import numpy as np
from scipy import linalg, signal

from core.arma.model import ArmaModel
from core.errors import InvalidArgumentError, UnsupportedInputError
from core.series.timeseries import TimeSeries

LOG_2PI = float(np.log(2.0 * np.pi))
STEADY_TOL = 1e-13


def state_space(ar, ma) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transition T, selection R and stationary covariance P0 (unit noise variance).

    State dimension r = max(p, q + 1); the observation picks the first state.
    """
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    p, q = ar.size, ma.size
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = ar
    T[:-1, 1:] = np.eye(r - 1)
    R = np.zeros(r)
    R[0] = 1.0
    R[1:q + 1] = ma
    RR = np.outer(R, R)
    P0 = linalg.solve_discrete_lyapunov(T, RR, method="direct")
    return T, R, (P0 + P0.T) / 2.0


def kalman_innovations(ar, ma, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-step innovations and their variances for zero-mean data at sigma^2 = 1.

    Y may carry several columns (filtered with the same gains). Once the
    prediction covariance reaches its limit the rest of the series is run
    through the equivalent ARMA recursion with `scipy.signal.lfilter`.
    """
    Y = np.asarray(Y, dtype=float)
    squeeze = Y.ndim == 1
    if squeeze:
        Y = Y[:, None]
    n, k = Y.shape
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    T, R, P = state_space(ar, ma)
    RR = np.outer(R, R)
    r = T.shape[0]
    V = np.empty((n, k))
    F = np.ones(n)
    a = np.zeros((r, k))
    lead = max(ar.size, ma.size)
    steady_from = n
    for t in range(n):
        if t >= lead and np.max(np.abs(P - RR)) < STEADY_TOL:
            steady_from = t
            break
        f = P[0, 0]
        v = Y[t] - a[0]
        V[t] = v
        F[t] = f
        K = (T @ P[:, 0]) / f
        a = T @ a + np.outer(K, v)
        P = T @ P @ T.T + RR - f * np.outer(K, K)
    if steady_from < n:
        s = steady_from
        b = np.concatenate([[1.0], -ar])
        den = np.concatenate([[1.0], ma])
        m = max(b.size, den.size) - 1
        zi = np.zeros((m, k))
        if m:
            for col in range(k):
                past_out = V[s - ma.size:s, col][::-1] if ma.size else []
                past_in = Y[s - ar.size:s, col][::-1] if ar.size else []
                zi[:, col] = signal.lfiltic(b, den, past_out, past_in)
            V[s:] = signal.lfilter(b, den, Y[s:], axis=0, zi=zi)[0]
        else:
            V[s:] = Y[s:]
        F[s:] = 1.0
    return (V[:, 0] if squeeze else V), F


def _require_complete(series: TimeSeries) -> np.ndarray:
    if not series.is_complete:
        raise UnsupportedInputError(
            f"series '{series.name}' has {len(series) - series.n_observed} missing values; "
            "the ARMA likelihood needs a complete series"
        )
    return series.values


def log_likelihood(model: ArmaModel, series: TimeSeries) -> float:
    y = _require_complete(series)
    model.validate(require_invertible=False)
    v, f = kalman_innovations(model.ar, model.ma, y - model.mean)
    s2 = model.noise_variance * f
    return float(-0.5 * np.sum(LOG_2PI + np.log(s2) + v * v / s2))


def arma_autocovariance(model: ArmaModel, max_lag: int) -> np.ndarray:
    """gamma(0..max_lag) from the linear equations relating gamma, phi and the psi weights."""
    model.validate(require_invertible=False)
    ar = np.asarray(model.ar)
    theta = np.concatenate([[1.0], model.ma])
    p, q = model.p, model.q
    m = max(p, q)
    psi = np.zeros(q + 1)
    psi[0] = 1.0
    for j in range(1, q + 1):
        psi[j] = theta[j] + sum(ar[i - 1] * psi[j - i] for i in range(1, min(j, p) + 1))
    A = np.zeros((m + 1, m + 1))
    rhs = np.zeros(m + 1)
    for k in range(m + 1):
        A[k, k] += 1.0
        for i in range(1, p + 1):
            A[k, abs(k - i)] -= ar[i - 1]
        rhs[k] = sum(theta[j] * psi[j - k] for j in range(k, q + 1))
    head = np.linalg.solve(A, rhs) * model.noise_variance
    gamma = np.zeros(max(max_lag, m) + 1)
    gamma[:m + 1] = head
    for k in range(m + 1, gamma.size):
        gamma[k] = sum(ar[i - 1] * gamma[k - i] for i in range(1, p + 1))
    return gamma[:max_lag + 1]


def innovations_log_likelihood(model: ArmaModel, series: TimeSeries) -> float:
    """Exact likelihood through the innovations algorithm on the model autocovariances."""
    y = _require_complete(series)
    x = y - model.mean
    n = x.size
    gamma = arma_autocovariance(model, n)
    theta = np.zeros((n, n + 1))
    v = np.zeros(n)
    xhat = np.zeros(n)
    v[0] = gamma[0]
    for m in range(1, n):
        for k in range(m):
            acc = np.dot(theta[k, k:0:-1] * theta[m, m:m - k:-1], v[:k]) if k else 0.0
            theta[m, m - k] = (gamma[m - k] - acc) / v[k]
        v[m] = gamma[0] - np.dot(theta[m, m:0:-1] ** 2, v[:m])
        xhat[m] = np.dot(theta[m, 1:m + 1], (x - xhat)[m - 1::-1])
    e = x - xhat
    return float(-0.5 * np.sum(LOG_2PI + np.log(v) + e * e / v))


def filter_with_model(series: TimeSeries, model: ArmaModel) -> TimeSeries:
    """Residuals of `series` under `model`: innovation / sqrt(relative variance).

    The output is on the data scale (variance close to sigma^2 throughout).
    """
    y = _require_complete(series)
    model.validate(require_invertible=False)
    v, f = kalman_innovations(model.ar, model.ma, y - model.mean)
    return series.with_values(v / np.sqrt(f), name=f"{series.name}_resid")


def forecast_errors(model: ArmaModel, values, horizon: int,
                    backward: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """h-step forecasts (h = 1..horizon) and their variances for a zero-mean ARMA path.

    With `backward` the path is reversed first, so h counts steps before the
    first observation (Gaussian ARMA processes are time reversible).
    """
    horizon = int(horizon)
    if horizon < 1:
        raise InvalidArgumentError(f"horizon must be positive, got {horizon}")
    x = np.asarray(values, dtype=float)
    if backward:
        x = x[::-1]
    T, R, P = state_space(model.ar, model.ma)
    RR = np.outer(R, R)
    a = np.zeros(T.shape[0])
    for obs in x:
        f = P[0, 0]
        K = (T @ P[:, 0]) / f
        a = T @ a + K * (obs - a[0])
        P = T @ P @ T.T + RR - f * np.outer(K, K)
    means = np.empty(horizon)
    variances = np.empty(horizon)
    for h in range(horizon):
        means[h] = a[0]
        variances[h] = model.noise_variance * P[0, 0]
        a = T @ a
        P = T @ P @ T.T + RR
    return means, variances
