from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Annual series on consecutive integer times; NaN marks a missing value.

    `values` is stored as a read-only float array so a series can be shared
    freely once built.
    """

    start_time: int
    values: np.ndarray
    name: str = "value"

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 1:
            raise InvalidArgumentError("TimeSeries needs at least one observation")
        if np.isinf(arr).any():
            raise InvalidArgumentError("TimeSeries values must be finite or NaN")
        try:
            start = float(self.start_time)
        except (TypeError, ValueError):
            start = float("nan")
        if not start.is_integer():
            raise InvalidArgumentError(f"start_time must be a whole year, got {self.start_time!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_time", int(start))

    def __len__(self) -> int:
        return self.values.size

    @property
    def end_time(self) -> int:
        return self.start_time + len(self) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start_time, self.end_time + 1)

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def n_observed(self) -> int:
        return int((~self.missing_mask).sum())

    @property
    def is_complete(self) -> bool:
        return self.n_observed == len(self)

    def index_of(self, time: int) -> int:
        idx = int(time) - self.start_time
        if idx < 0 or idx >= len(self):
            raise InvalidArgumentError(f"time {time} outside [{self.start_time}, {self.end_time}]")
        return idx

    def value_at(self, time: int) -> float:
        """Value at `time`, NaN when the time is outside the series."""
        idx = int(time) - self.start_time
        if idx < 0 or idx >= len(self):
            return float("nan")
        return float(self.values[idx])

    def window(self, start: int, end: int) -> TimeSeries:
        """Inclusive sub-series on [start, end]."""
        if start > end:
            raise InvalidArgumentError(f"empty window [{start}, {end}]")
        i, j = self.index_of(start), self.index_of(end)
        return TimeSeries(start, self.values[i:j + 1], self.name)

    def with_values(self, values, name: str | None = None) -> TimeSeries:
        return TimeSeries(self.start_time, values, self.name if name is None else name)

    def to_pandas(self) -> pd.Series:
        return pd.Series(self.values, index=pd.Index(self.times, name="year"), name=self.name)

    @classmethod
    def from_pandas(cls, series: pd.Series, name: str | None = None) -> TimeSeries:
        years = np.asarray(series.index, dtype=int)
        if years.size == 0:
            raise InvalidArgumentError("empty pandas series")
        if np.any(np.diff(years) != 1):
            raise InvalidArgumentError("pandas index must be consecutive integer years")
        return cls(int(years[0]), series.to_numpy(dtype=float), name or str(series.name or "value"))


def overlap(a: TimeSeries, b: TimeSeries) -> tuple[int, int]:
    """Common inclusive time range of two series, or an error when disjoint."""
    start = max(a.start_time, b.start_time)
    end = min(a.end_time, b.end_time)
    if start > end:
        raise InvalidArgumentError(
            f"series do not overlap: [{a.start_time}, {a.end_time}] vs [{b.start_time}, {b.end_time}]"
        )
    return start, end
