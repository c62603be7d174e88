"""CSV ingestion and emission for annual series and proxy panels.

Layout: header `year,<name>...`, one row per year, "." decimals, empty or
"NA" for a missing value. Rows are numbered from 1 after the header and
columns from 1 with `year` as column 1, which is how parse errors point at
cells.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.errors import CsvParseError, InvalidArgumentError
from core.logkit import get_logger
from core.pca.panel import ProxyPanel
from core.series.timeseries import TimeSeries

log = get_logger(__name__)

ROLES = ("response", "panel")
MISSING_TOKENS = {"", "NA"}
YEAR_COLUMN = "year"


@dataclass
class ParseReport:
    path: str
    rows_read: int = 0
    columns: list[str] = field(default_factory=list)
    missing_counts: dict[str, int] = field(default_factory=dict)
    inserted_years: list[int] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "path": self.path,
            "rows_read": self.rows_read,
            "columns": list(self.columns),
            "missing_counts": dict(self.missing_counts),
            "inserted_years": list(self.inserted_years),
            "failures": list(self.failures),
        }


@dataclass(frozen=True, eq=False)
class LoadedFile:
    role: str
    report: ParseReport
    series: TimeSeries | None = None
    panel: ProxyPanel | None = None


@dataclass(frozen=True, eq=False)
class Dataset:
    response: TimeSeries
    panel: ProxyPanel | None = None
    provenance: dict = field(default_factory=dict)


def _read_frame(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise CsvParseError(path, "missing file")
    options = dict(dtype=str, keep_default_na=False, encoding="utf-8", skipinitialspace=True)
    try:
        frame = pd.read_csv(path, **options)
        # pandas renames repeated labels (a, a.1); the raw header row keeps them
        header = pd.read_csv(path, header=None, nrows=1, **options).iloc[0]
    except pd.errors.EmptyDataError:
        raise CsvParseError(path, "file is empty (no header row)") from None
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise CsvParseError(path, f"malformed CSV: {exc}") from None
    names = [str(c).strip() for c in header]
    if len(names) != len(frame.columns):
        raise CsvParseError(path, f"header has {len(names)} fields but rows have {len(frame.columns)}")
    repeated = sorted({c for c in names if names.count(c) > 1})
    if repeated:
        raise CsvParseError(path, f"header repeats column name(s) {repeated}")
    frame.columns = names
    return frame


def _ensure_header(frame: pd.DataFrame, path: str) -> None:
    if not len(frame.columns) or frame.columns[0] != YEAR_COLUMN:
        raise CsvParseError(path, f"first header column must be '{YEAR_COLUMN}', got {list(frame.columns)[:1]}")
    if len(frame.columns) < 2:
        raise CsvParseError(path, "header needs at least one value column after 'year'")
    if frame.empty:
        raise CsvParseError(path, "no data rows")


def _parse_years(frame: pd.DataFrame, path: str) -> np.ndarray:
    years = []
    for i, cell in enumerate(frame[YEAR_COLUMN], start=1):
        try:
            years.append(int(str(cell).strip()))
        except ValueError:
            raise CsvParseError(path, f"year '{cell}' is not an integer", row=i, column=1) from None
    years = np.asarray(years, dtype=int)
    for i in range(1, years.size):
        if years[i] <= years[i - 1]:
            raise CsvParseError(path, f"years must be strictly increasing ({years[i - 1]} then {years[i]})",
                                row=i + 1, column=1)
    return years


def _parse_values(frame: pd.DataFrame, columns: list[str], path: str, report: ParseReport) -> np.ndarray:
    out = np.full((len(frame), len(columns)), np.nan)
    for j, name in enumerate(columns):
        col_no = list(frame.columns).index(name) + 1
        missing = 0
        for i, cell in enumerate(frame[name], start=1):
            text = str(cell).strip()
            if text in MISSING_TOKENS:
                missing += 1
                continue
            try:
                value = float(text)
            except ValueError:
                value = float("nan")
            if not np.isfinite(value):
                report.failures.append({"row": i, "column": col_no, "header": name, "value": text})
                continue
            out[i - 1, j] = value
        if missing:
            report.missing_counts[name] = missing
    if report.failures:
        first = report.failures[0]
        raise CsvParseError(path, f"non-numeric cell '{first['value']}' ({len(report.failures)} failure(s))",
                            row=first["row"], column=first["column"], failures=report.failures)
    return out


def load_csv(path: str, role: str, column: str | None = None) -> LoadedFile:
    """Parse one file as a response series or a proxy panel.

    A response must have consecutive years (a gap is a hard error naming the
    row after it); panel gaps are filled with all-missing rows and listed in
    the report.
    """
    if role not in ROLES:
        raise InvalidArgumentError(f"role must be one of {ROLES}, got {role!r}")
    path = str(path)
    frame = _read_frame(path)
    _ensure_header(frame, path)
    report = ParseReport(path, rows_read=len(frame))
    years = _parse_years(frame, path)
    value_cols = [c for c in frame.columns if c != YEAR_COLUMN]
    if role == "response":
        if column is None:
            column = value_cols[0]
            if len(value_cols) > 1:
                log.info("%s has %d value columns; using '%s'", path, len(value_cols), column)
        elif column not in value_cols:
            raise CsvParseError(path, f"no column named '{column}'; have {value_cols}")
        value_cols = [column]
    report.columns = value_cols
    values = _parse_values(frame, value_cols, path, report)

    gaps = np.flatnonzero(np.diff(years) > 1)
    if role == "response":
        if gaps.size:
            i = int(gaps[0])
            raise CsvParseError(path, f"year gap between {years[i]} and {years[i + 1]}", row=i + 2, column=1)
        series = TimeSeries(int(years[0]), values[:, 0], value_cols[0])
        return LoadedFile(role, report, series=series)

    full = np.arange(years[0], years[-1] + 1)
    if gaps.size:
        report.inserted_years = [int(y) for y in np.setdiff1d(full, years)]
        log.warning("%s: %d missing panel years filled as missing", path, len(report.inserted_years))
    frame_vals = pd.DataFrame(values, index=years, columns=value_cols).reindex(full)
    panel = ProxyPanel(int(full[0]), tuple(value_cols), frame_vals.to_numpy(dtype=float))
    return LoadedFile(role, report, panel=panel)


def combine(response: TimeSeries, panel: ProxyPanel, provenance: dict | None = None) -> Dataset:
    """Restrict the response and the panel to their common years, recording the trim."""
    start = max(response.start_time, panel.start_time)
    end = min(response.end_time, panel.end_time)
    if start > end:
        raise InvalidArgumentError(
            f"response years [{response.start_time}, {response.end_time}] and panel years "
            f"[{panel.start_time}, {panel.end_time}] do not overlap"
        )
    if end - start < 1:
        raise InvalidArgumentError(f"response and panel share only the year {start}")
    prov = dict(provenance or {})
    prov["alignment"] = {
        "response_years": [response.start_time, response.end_time],
        "panel_years": [panel.start_time, panel.end_time],
        "common_years": [start, end],
        "response_trimmed": [start - response.start_time, response.end_time - end],
        "panel_trimmed": [start - panel.start_time, panel.end_time - end],
    }
    if (start, end) != (response.start_time, response.end_time) or (start, end) != (panel.start_time, panel.end_time):
        log.info("aligned response and panel on %d-%d", start, end)
    return Dataset(response.window(start, end), panel.window(start, end), prov)


def load_dataset(response_path: str, panel_path: str | None = None, column: str | None = None) -> Dataset:
    resp = load_csv(response_path, "response", column)
    provenance = {"response": resp.report.as_dict()}
    if panel_path is None:
        return Dataset(resp.series, None, provenance)
    pan = load_csv(panel_path, "panel")
    provenance["panel"] = pan.report.as_dict()
    return combine(resp.series, pan.panel, provenance)


def _frame_of(obj) -> pd.DataFrame:
    if isinstance(obj, TimeSeries):
        frame = obj.to_pandas().to_frame()
    elif isinstance(obj, ProxyPanel):
        frame = obj.to_frame()
    elif isinstance(obj, pd.DataFrame):
        return obj if isinstance(obj.index, pd.RangeIndex) else obj.reset_index()
    else:
        raise InvalidArgumentError(f"cannot write {type(obj).__name__} as CSV")
    return frame.reset_index()


def save_csv(path: str, obj) -> str:
    """Write a series or panel in the same layout `load_csv` reads (15 significant digits)."""
    frame = _frame_of(obj)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.15g", na_rep="NA", lineterminator="\n")
    log.ok("Wrote %s", path)
    return path


def to_csv_text(obj) -> str:
    return _frame_of(obj).to_csv(index=False, float_format="%.15g", na_rep="NA", lineterminator="\n")
