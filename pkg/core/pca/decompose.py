from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from core.errors import DegenerateColumnError, InvalidArgumentError
from core.pca.panel import ProxyPanel, impute_column_means
from core.series.timeseries import TimeSeries


@dataclass(frozen=True, eq=False)
class PcaDecomposition:
    start_time: int
    proxy_ids: tuple[str, ...]
    loadings: np.ndarray
    scores: np.ndarray
    explained_variance: np.ndarray
    singular_values: np.ndarray
    column_means: np.ndarray
    column_scales: np.ndarray
    total_variance: float
    standardized: bool
    imputed_counts: dict[str, int] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.loadings.shape[1]

    @property
    def explained_ratio(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance

    def top_loadings(self, component: int, count: int = 10) -> list[tuple[str, float]]:
        col = self.loadings[:, component]
        order = np.argsort(-np.abs(col), kind="stable")[:count]
        return [(self.proxy_ids[i], float(col[i])) for i in order]


def decompose(panel: ProxyPanel, k: int, standardize: bool = True) -> PcaDecomposition:
    """PCA of the centred (and, by default, unit-variance) panel through the SVD.

    Missing cells are mean-imputed first. Each loading column is signed so that
    its largest-magnitude entry is positive; explained variance is s^2 / n_years.
    """
    k = int(k)
    k_max = min(panel.n_years - 1, panel.n_proxies)
    if k < 1 or k > k_max:
        raise InvalidArgumentError(f"k must be in [1, {k_max}], got {k}")
    X, imputed = impute_column_means(panel)
    n = panel.n_years
    means = X.mean(axis=0)
    Xc = X - means
    if standardize:
        scales = Xc.std(axis=0)
        flat = np.flatnonzero(scales <= 64 * np.finfo(float).eps * np.maximum(np.abs(means), 1.0))
        if flat.size:
            raise DegenerateColumnError(panel.proxy_ids[flat[0]])
        Xc = Xc / scales
    else:
        scales = np.ones(panel.n_proxies)

    U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    loadings = Vt[:k].T.copy()
    for j in range(k):
        lead = int(np.argmax(np.abs(loadings[:, j])))
        if loadings[lead, j] < 0:
            loadings[:, j] = -loadings[:, j]
    scores = Xc @ loadings
    return PcaDecomposition(
        start_time=panel.start_time,
        proxy_ids=panel.proxy_ids,
        loadings=loadings,
        scores=scores,
        explained_variance=s[:k] ** 2 / n,
        singular_values=s[:k].copy(),
        column_means=means,
        column_scales=scales,
        total_variance=float(np.sum(Xc * Xc) / n),
        standardized=bool(standardize),
        imputed_counts=imputed,
    )


def score_series(decomp: PcaDecomposition, component: int) -> TimeSeries:
    component = int(component)
    if component < 0 or component >= decomp.k:
        raise InvalidArgumentError(f"component must be in [0, {decomp.k - 1}], got {component}")
    return TimeSeries(decomp.start_time, decomp.scores[:, component], f"pc{component}")
