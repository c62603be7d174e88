from core.series.stats import (
    AcfResult,
    LjungBoxResult,
    SeriesSummary,
    difference,
    durbin_levinson,
    linear_filter,
    ljung_box,
    sample_acf,
    sample_pacf,
    summary_stats,
)
from core.series.timeseries import TimeSeries, overlap

__all__ = [
    "AcfResult",
    "LjungBoxResult",
    "SeriesSummary",
    "TimeSeries",
    "difference",
    "durbin_levinson",
    "linear_filter",
    "ljung_box",
    "overlap",
    "sample_acf",
    "sample_pacf",
    "summary_stats",
]
