"""ARMA(p, q) parameters, the partial-autocorrelation bijection, and simulation.

Sign convention:

    Y_t - mu = sum_i phi_i (Y_{t-i} - mu) + Z_t + sum_j theta_j Z_{t-j},
    Z_t ~ IID N(0, sigma^2)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from core.errors import InvalidArgumentError, InvalidModelError
from core.series.timeseries import TimeSeries

ROOT_MARGIN = 1e-8
PACF_LIMIT = 1.0 - 1e-6
BURN_IN = 100


def _spectral_radius(poly_coefs: np.ndarray) -> float:
    # companion matrix of z^k - c_1 z^{k-1} - ... - c_k; eigenvalues are the
    # reciprocal roots of 1 - c_1 z - ... - c_k z^k
    k = poly_coefs.size
    if k == 0:
        return 0.0
    companion = np.zeros((k, k))
    companion[0, :] = poly_coefs
    companion[1:, :-1] = np.eye(k - 1)
    return float(np.max(np.abs(np.linalg.eigvals(companion))))


@dataclass(frozen=True)
class ArmaModel:
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    mean: float = 0.0
    noise_variance: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(a) for a in np.ravel(self.ar)))
        object.__setattr__(self, "ma", tuple(float(b) for b in np.ravel(self.ma)))
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "noise_variance", float(self.noise_variance))
        if not np.all(np.isfinite(self.ar + self.ma + (self.mean, self.noise_variance))):
            raise InvalidModelError("ARMA parameters must be finite")
        if self.noise_variance <= 0:
            raise InvalidModelError(f"noise_variance must be positive, got {self.noise_variance}")

    @property
    def p(self) -> int:
        return len(self.ar)

    @property
    def q(self) -> int:
        return len(self.ma)

    @property
    def order(self) -> tuple[int, int]:
        return self.p, self.q

    def ar_radius(self) -> float:
        return _spectral_radius(np.asarray(self.ar))

    def ma_radius(self) -> float:
        # 1 + theta_1 z + ... has the same roots as 1 - (-theta_1) z - ...
        return _spectral_radius(-np.asarray(self.ma))

    def is_causal(self) -> bool:
        return self.ar_radius() < 1.0 - ROOT_MARGIN

    def is_invertible(self) -> bool:
        return self.ma_radius() < 1.0 - ROOT_MARGIN

    def validate(self, require_invertible: bool = True, allow_unit_root_ma: bool = False) -> None:
        if not self.is_causal():
            raise InvalidModelError(f"AR polynomial is not causal (reciprocal root radius {self.ar_radius():.6g})")
        if require_invertible and not self.is_invertible():
            radius = self.ma_radius()
            if allow_unit_root_ma and radius <= 1.0 + 1e-12:
                return
            raise InvalidModelError(f"MA polynomial is not invertible (reciprocal root radius {radius:.6g})")

    def with_mean(self, mean: float) -> ArmaModel:
        return ArmaModel(self.ar, self.ma, mean, self.noise_variance)

    def describe(self) -> str:
        ar = ", ".join(f"{a:.4f}" for a in self.ar) or "-"
        ma = ", ".join(f"{b:.4f}" for b in self.ma) or "-"
        return f"ARMA({self.p},{self.q}) ar=[{ar}] ma=[{ma}] mean={self.mean:.4g} sigma2={self.noise_variance:.4g}"


def pacf_to_coefficients(pacf) -> np.ndarray:
    """Map partial autocorrelations in (-1, 1)^k to causal AR coefficients.

    Durbin-Levinson step-up: phi_k,k = r_k and phi_k,j = phi_{k-1},j - r_k phi_{k-1},{k-j}.
    """
    r = np.asarray(pacf, dtype=float).reshape(-1)
    phi = np.zeros(0)
    for rk in r:
        phi = np.concatenate([phi - rk * phi[::-1], [rk]])
    return phi


def coefficients_to_pacf(coefs) -> np.ndarray:
    """Inverse of `pacf_to_coefficients` (step-down recursion)."""
    phi = np.asarray(coefs, dtype=float).reshape(-1).copy()
    k = phi.size
    r = np.zeros(k)
    for m in range(k, 0, -1):
        rm = phi[m - 1]
        if abs(rm) >= 1.0:
            raise InvalidModelError("coefficients lie outside the causal region")
        r[m - 1] = rm
        if m > 1:
            head = phi[:m - 1]
            phi = (head + rm * head[::-1]) / (1.0 - rm * rm)
    return r


def ar_from_unconstrained(u) -> np.ndarray:
    return pacf_to_coefficients(PACF_LIMIT * np.tanh(np.asarray(u, dtype=float)))


def ma_from_unconstrained(u) -> np.ndarray:
    # MA polynomial 1 + theta z: invertible iff -theta is a causal AR vector
    return -pacf_to_coefficients(PACF_LIMIT * np.tanh(np.asarray(u, dtype=float)))


def unconstrained_from_ar(ar) -> np.ndarray:
    r = np.clip(coefficients_to_pacf(ar) / PACF_LIMIT, -1 + 1e-12, 1 - 1e-12)
    return np.arctanh(r)


def unconstrained_from_ma(ma) -> np.ndarray:
    return unconstrained_from_ar(-np.asarray(ma, dtype=float))


def simulate(model: ArmaModel, n: int, seed: int, allow_unit_root_ma: bool = False,
             name: str = "simulated", start_time: int = 0) -> TimeSeries:
    """Draw n observations; burn-in of max(p, q) + 100 steps when the model has dynamics."""
    n = int(n)
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    model.validate(require_invertible=True, allow_unit_root_ma=allow_unit_root_ma)
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(model.noise_variance)
    if model.p == 0 and model.q == 0:
        return TimeSeries(start_time, model.mean + sigma * rng.standard_normal(n), name)
    burn = max(model.p, model.q) + BURN_IN
    z = sigma * rng.standard_normal(n + burn)
    b = np.concatenate([[1.0], model.ma])
    a = np.concatenate([[1.0], -np.asarray(model.ar)])
    y = signal.lfilter(b, a, z)[burn:]
    return TimeSeries(start_time, model.mean + y, name)
