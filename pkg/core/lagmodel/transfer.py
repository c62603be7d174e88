"""Lag scanning and regression on lagged covariates with ARMA errors.

Offsets follow one convention everywhere: a LagSpec offset l puts
covariate_{t+l} on the right-hand side for response_t, so l = -14 means the
covariate value from 14 years earlier.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import statsmodels.api as sm
from scipy import linalg

from core.arma.fit import fit as fit_arma
from core.arma.likelihood import LOG_2PI, forecast_errors, kalman_innovations, log_likelihood
from core.arma.model import ArmaModel
from core.ccf.crosscorr import cross_correlation, prewhitened_ccf
from core.errors import (
    CollinearityError,
    CoverageError,
    InvalidArgumentError,
    UnsupportedInputError,
)
from core.logkit import get_logger
from core.series.timeseries import TimeSeries, overlap

log = get_logger(__name__)

MAX_OFFSET = 40
MAX_ROUNDS = 50
REL_TOL = 1e-10
MIN_SCAN_PAIRS = 20


@dataclass(frozen=True)
class LagSpec:
    label: str
    offsets: tuple[int, ...]

    def __post_init__(self):
        offsets = tuple(int(o) for o in self.offsets)
        if not offsets:
            raise InvalidArgumentError(f"LagSpec '{self.label}' needs at least one offset")
        if len(set(offsets)) != len(offsets):
            raise InvalidArgumentError(f"LagSpec '{self.label}' has repeated offsets {offsets}")
        if any(abs(o) > MAX_OFFSET for o in offsets):
            raise InvalidArgumentError(f"LagSpec '{self.label}' offsets must lie within +/-{MAX_OFFSET}")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "label", str(self.label))


def term_name(label: str, offset: int) -> str:
    if offset == 0:
        return f"{label}_t"
    return f"{label}_{{t{offset:+d}}}"


@dataclass(frozen=True)
class LagScanEntry:
    lag: int
    correlation: float
    score: float
    significant: bool

    @property
    def regression_offset(self) -> int:
        """LagSpec offset that puts this alignment on the right-hand side."""
        return -self.lag

    def equation(self, response: str = "y", covariate: str = "x") -> str:
        return f"{response}_t ~ {term_name(covariate, self.regression_offset)}"


@dataclass(frozen=True)
class LagScan:
    entries: tuple[LagScanEntry, ...]
    bound: float
    n: int
    mode: str
    selected_order: tuple[int, int] | None = None

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def significant(self) -> list[LagScanEntry]:
        return [e for e in self.entries if e.significant]


def lag_scan(y: TimeSeries, x: TimeSeries, max_lag: int, prewhiten: bool = False,
             p_max: int = 2, q_max: int = 2) -> LagScan:
    """Rank every lag by |corr(y_{t+h}, x_t)|, significant or not."""
    start, end = overlap(x, y)
    if end - start + 1 - int(max_lag) < MIN_SCAN_PAIRS:
        raise InvalidArgumentError(
            f"overlap of {end - start + 1} years leaves fewer than {MIN_SCAN_PAIRS} pairs at lag {max_lag}"
        )
    if prewhiten:
        ccf = prewhitened_ccf(x, y, max_lag, p_max, q_max, mode="prewhitened-x")
    else:
        ccf = cross_correlation(x, y, max_lag)
    entries = [
        LagScanEntry(int(h), float(c), abs(float(c)), abs(float(c)) > ccf.bound)
        for h, c in zip(ccf.lags, ccf.correlations)
    ]
    entries.sort(key=lambda e: (-e.score, abs(e.lag), e.lag))
    return LagScan(tuple(entries), float(ccf.bound), ccf.n, ccf.mode, ccf.selected_order)


@dataclass(frozen=True)
class TransferTerm:
    label: str
    offset: int
    coefficient: float
    std_error: float
    dropped: bool = False

    @property
    def name(self) -> str:
        return term_name(self.label, self.offset)


@dataclass(frozen=True, eq=False)
class TransferModel:
    response_name: str
    include_intercept: bool
    intercept: float
    intercept_se: float
    terms: tuple[TransferTerm, ...]
    noise_model: ArmaModel
    fit_start: int
    fit_end: int
    response: TimeSeries
    residuals: TimeSeries
    coef_cov: np.ndarray
    loglik: float
    r_squared: float
    converged: bool
    rounds: int

    @property
    def n(self) -> int:
        return int(self.residuals.n_observed)

    @property
    def coefficients(self) -> dict[tuple[str, int], float]:
        return {(t.label, t.offset): t.coefficient for t in self.terms}

    def fitted(self) -> TimeSeries:
        return self.residuals.with_values(
            self.response.values - self.residuals.values, name=f"{self.response_name}_fitted"
        )

    def equation(self) -> str:
        parts = [f"{self.intercept:.6g}"] if self.include_intercept else []
        for t in self.terms:
            parts.append(f"{t.coefficient:.6g}*{t.name}")
        rhs = " + ".join(parts) if parts else "0"
        p, q = self.noise_model.order
        return f"{self.response_name}_t = {rhs} + e_t,  e_t ~ ARMA({p},{q})"


def _regressor_column(x: TimeSeries, offset: int, times: np.ndarray) -> np.ndarray:
    idx = times + offset - x.start_time
    out = np.full(times.size, np.nan)
    ok = (idx >= 0) & (idx < len(x))
    out[ok] = x.values[idx[ok]]
    return out


def _fit_window(y: TimeSeries, covariates) -> tuple[int, int]:
    start, end = y.start_time, y.end_time
    for x, spec in covariates:
        for off in spec.offsets:
            start = max(start, x.start_time - off)
            end = min(end, x.end_time - off)
    if start > end:
        raise InvalidArgumentError("no common window between the response and the lagged covariates")
    return start, end


def _whitened(columns: np.ndarray, model: ArmaModel) -> np.ndarray:
    if model.p == 0 and model.q == 0:
        return columns
    V, F = kalman_innovations(model.ar, model.ma, columns)
    return V / np.sqrt(F)[:, None]


def _check_rank(X: np.ndarray, names: list[str]) -> None:
    if X.shape[1] == 0:
        return
    _, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(float).eps * diag[0] * 1e3
    rank = int(np.sum(diag > tol))
    if rank < X.shape[1]:
        raise CollinearityError([names[i] for i in sorted(piv[rank:])])


def _gaussian_loglik(resid: np.ndarray, sigma2: float) -> float:
    return float(-0.5 * np.sum(LOG_2PI + np.log(sigma2) + resid * resid / sigma2))


def fit_transfer(y: TimeSeries, covariates, error_p: int = 0, error_q: int = 0,
                 include_intercept: bool = True) -> TransferModel:
    """Regression of y_t on covariate_{t+l} terms with ARMA(error_p, error_q) errors.

    Coefficients and error parameters are estimated by alternating GLS (through
    the error model's whitening filter) with an ARMA fit of y - X beta, until the
    likelihood settles. White errors reduce to ordinary least squares, and then
    response rows with missing values are simply left out.
    """
    covariates = list(covariates)
    error_p, error_q = int(error_p), int(error_q)
    start, end = _fit_window(y, covariates)
    times = np.arange(start, end + 1)
    yw = y.window(start, end)
    yv = yw.values

    names, cols, keys = [], [], []
    for x, spec in covariates:
        for off in spec.offsets:
            col = _regressor_column(x, off, times)
            if np.isnan(col).any():
                bad = int(times[np.isnan(col)][0])
                raise UnsupportedInputError(
                    f"covariate '{spec.label}' is missing at year {bad + off} (needed for {term_name(spec.label, off)})"
                )
            names.append(term_name(spec.label, off))
            cols.append(col)
            keys.append((spec.label, off))
    white = error_p == 0 and error_q == 0
    rows = ~np.isnan(yv)
    if not white and not rows.all():
        raise UnsupportedInputError("ARMA errors need a complete response on the fit window")
    n_rows = int(rows.sum())
    if len(keys) > n_rows / 10:
        raise InvalidArgumentError(f"{len(keys)} coefficients is too many for {n_rows} observations (limit n/10)")

    if not keys and not white:
        return _plain_arma(yw, error_p, error_q, include_intercept)

    zero = [j for j, c in enumerate(cols) if not np.any(c)]
    for j in zero:
        log.warning("regressor %s is identically zero on the fit window; coefficient fixed at 0", names[j])
    active = [j for j in range(len(cols)) if j not in zero]
    design_cols = ([np.ones(times.size)] if include_intercept else []) + [cols[j] for j in active]
    design_names = (["intercept"] if include_intercept else []) + [names[j] for j in active]
    X = np.column_stack(design_cols) if design_cols else np.zeros((times.size, 0))
    _check_rank(X[rows], design_names)

    noise = ArmaModel()
    rounds, converged, previous = 0, True, None
    while True:
        rounds += 1
        if white:
            beta, cov_unscaled = _ols(yv[rows], X[rows])
            resid = yv - X @ beta
            sigma2 = float(np.mean(resid[rows] ** 2))
            noise = ArmaModel((), (), 0.0, sigma2)
            loglik = _gaussian_loglik(resid[rows], sigma2)
            break
        beta, cov_unscaled = _gls(yv, X, noise)
        resid = yv - X @ beta
        report = fit_arma(yw.with_values(resid, name=f"{y.name}_regresid"), error_p, error_q, include_mean=False)
        noise = report.model
        loglik = report.loglik
        converged = converged and report.converged
        if previous is not None and abs(loglik - previous) <= REL_TOL * max(1.0, abs(loglik)):
            break
        if rounds >= MAX_ROUNDS:
            converged = False
            log.warning("transfer fit for '%s' did not settle after %d rounds", y.name, MAX_ROUNDS)
            break
        previous = loglik

    if not white:
        beta, cov_unscaled = _gls(yv, X, noise)
        resid = yv - X @ beta
        loglik = log_likelihood(noise, yw.with_values(resid))
    cov = noise.noise_variance * cov_unscaled

    obs = yv[rows]
    tss = float(np.sum((obs - obs.mean()) ** 2)) if include_intercept else float(np.sum(obs ** 2))
    r2 = 1.0 - float(np.sum(resid[rows] ** 2)) / tss if tss > 0 else 0.0

    offset = 1 if include_intercept else 0
    terms = []
    for j, (label, off) in enumerate(keys):
        if j in zero:
            terms.append(TransferTerm(label, off, 0.0, float("nan"), dropped=True))
        else:
            pos = offset + active.index(j)
            terms.append(TransferTerm(label, off, float(beta[pos]), float(np.sqrt(cov[pos, pos]))))
    model = TransferModel(
        response_name=y.name,
        include_intercept=include_intercept,
        intercept=float(beta[0]) if include_intercept else 0.0,
        intercept_se=float(np.sqrt(cov[0, 0])) if include_intercept else float("nan"),
        terms=tuple(terms),
        noise_model=noise,
        fit_start=start,
        fit_end=end,
        response=yw,
        residuals=yw.with_values(resid, name=f"{y.name}_regresid"),
        coef_cov=cov,
        loglik=float(loglik),
        r_squared=r2,
        converged=converged,
        rounds=rounds,
    )
    return model


def _ols(y: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if X.shape[1] == 0:
        return np.zeros(0), np.zeros((0, 0))
    res = sm.OLS(y, X).fit()
    return np.asarray(res.params, dtype=float), np.asarray(res.normalized_cov_params, dtype=float)


def _gls(y: np.ndarray, X: np.ndarray, noise: ArmaModel) -> tuple[np.ndarray, np.ndarray]:
    W = _whitened(np.column_stack([y, X]), noise)
    return _ols(W[:, 0], W[:, 1:])


def _plain_arma(yw: TimeSeries, p: int, q: int, include_intercept: bool) -> TransferModel:
    """No covariates: the transfer model is the ARMA fit itself."""
    report = fit_arma(yw, p, q, include_mean=include_intercept)
    noise = report.model.with_mean(0.0)
    mu = report.model.mean if include_intercept else 0.0
    resid = yw.values - mu
    if include_intercept:
        # GLS variance of the mean under the fitted error model
        _, cov_unscaled = _gls(yw.values, np.ones((len(yw), 1)), noise)
        cov = noise.noise_variance * cov_unscaled
    else:
        cov = np.zeros((0, 0))
    model = TransferModel(
        response_name=yw.name,
        include_intercept=include_intercept,
        intercept=mu,
        intercept_se=float(np.sqrt(cov[0, 0])) if include_intercept else float("nan"),
        terms=(),
        noise_model=noise,
        fit_start=yw.start_time,
        fit_end=yw.end_time,
        response=yw,
        residuals=yw.with_values(resid, name=f"{yw.name}_regresid"),
        coef_cov=cov,
        loglik=report.loglik,
        r_squared=0.0,
        converged=report.converged,
        rounds=1,
    )
    return model


@dataclass(frozen=True)
class Prediction:
    mean: TimeSeries
    std_error: TimeSeries
    in_window: np.ndarray


def predict(model: TransferModel, covariates, times) -> Prediction:
    """Xb plus the ARMA error forecast (after the window) or backcast (before it).

    Inside the fit window the prediction is the fitted value. Standard errors
    combine the coefficient covariance with the error forecast variance (the
    innovation variance inside the window).
    """
    times = np.asarray(sorted(int(t) for t in times), dtype=int)
    if times.size == 0:
        raise InvalidArgumentError("no target times")
    if np.any(np.diff(times) != 1):
        raise InvalidArgumentError("target times must be consecutive years")
    lookup = {spec.label: x for x, spec in covariates}
    rows = [np.ones(times.size)] if model.include_intercept else []
    for term in model.terms:
        if term.dropped:
            continue
        if term.label not in lookup:
            raise InvalidArgumentError(f"covariate '{term.label}' was not supplied")
        col = _regressor_column(lookup[term.label], term.offset, times)
        missing = np.flatnonzero(np.isnan(col))
        if missing.size:
            raise CoverageError(term.label, int(times[missing[0]]), term.offset)
        rows.append(col)
    X = np.column_stack(rows) if rows else np.zeros((times.size, 0))
    beta = ([model.intercept] if model.include_intercept else []) + [t.coefficient for t in model.terms if not t.dropped]
    mean = X @ np.asarray(beta, dtype=float) if beta else np.zeros(times.size)
    coef_var = np.einsum("ij,jk,ik->i", X, model.coef_cov, X) if beta else np.zeros(times.size)

    noise = model.noise_model
    err_mean = np.zeros(times.size)
    err_var = np.full(times.size, noise.noise_variance)
    after = times > model.fit_end
    before = times < model.fit_start
    white = noise.p == 0 and noise.q == 0
    if not white and after.any():
        h = times[after] - model.fit_end
        m, v = forecast_errors(noise, model.residuals.values, int(h.max()))
        err_mean[after], err_var[after] = m[h - 1], v[h - 1]
    if not white and before.any():
        h = model.fit_start - times[before]
        m, v = forecast_errors(noise, model.residuals.values, int(h.max()), backward=True)
        err_mean[before], err_var[before] = m[h - 1], v[h - 1]

    start = int(times[0])
    return Prediction(
        mean=TimeSeries(start, mean + err_mean, f"{model.response_name}_pred"),
        std_error=TimeSeries(start, np.sqrt(coef_var + err_var), f"{model.response_name}_se"),
        in_window=~(after | before),
    )
