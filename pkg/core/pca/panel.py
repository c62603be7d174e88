from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.errors import DegenerateColumnError, InvalidArgumentError
from core.logkit import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ProxyPanel:
    """n_years x n_proxies matrix on a consecutive year axis; NaN marks missing cells."""

    start_time: int
    proxy_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise InvalidArgumentError(f"panel values must be 2-D, got shape {arr.shape}")
        ids = tuple(str(p) for p in self.proxy_ids)
        if arr.shape[0] < 2:
            raise InvalidArgumentError(f"panel needs at least 2 years, got {arr.shape[0]}")
        if arr.shape[1] != len(ids):
            raise InvalidArgumentError(f"{arr.shape[1]} columns but {len(ids)} proxy ids")
        if len(set(ids)) != len(ids):
            dupes = sorted({p for p in ids if ids.count(p) > 1})
            raise InvalidArgumentError(f"duplicate proxy ids: {dupes}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "proxy_ids", ids)
        object.__setattr__(self, "start_time", int(self.start_time))

    @property
    def n_years(self) -> int:
        return self.values.shape[0]

    @property
    def n_proxies(self) -> int:
        return self.values.shape[1]

    @property
    def end_time(self) -> int:
        return self.start_time + self.n_years - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start_time, self.end_time + 1)

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def window(self, start: int, end: int) -> ProxyPanel:
        if start < self.start_time or end > self.end_time or start > end:
            raise InvalidArgumentError(
                f"window [{start}, {end}] outside panel years [{self.start_time}, {self.end_time}]"
            )
        i, j = start - self.start_time, end - self.start_time
        return ProxyPanel(start, self.proxy_ids, self.values[i:j + 1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, index=pd.Index(self.times, name="year"), columns=list(self.proxy_ids))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> ProxyPanel:
        years = np.asarray(frame.index, dtype=int)
        if years.size and np.any(np.diff(years) != 1):
            raise InvalidArgumentError("panel index must be consecutive integer years")
        return cls(int(years[0]) if years.size else 0, tuple(frame.columns), frame.to_numpy(dtype=float))


def impute_column_means(panel: ProxyPanel) -> tuple[np.ndarray, dict[str, int]]:
    """Fill each column's missing cells with that column's observed mean."""
    X = np.array(panel.values, dtype=float)
    mask = np.isnan(X)
    counts: dict[str, int] = {}
    for j, pid in enumerate(panel.proxy_ids):
        missing = int(mask[:, j].sum())
        if missing == 0:
            continue
        if missing == panel.n_years:
            raise DegenerateColumnError(pid, f"Column '{pid}' has no observed values")
        X[mask[:, j], j] = X[~mask[:, j], j].mean()
        counts[pid] = missing
    if counts:
        log.info("mean-imputed %d cells across %d proxies", sum(counts.values()), len(counts))
    return X, counts
