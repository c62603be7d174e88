import json
import math

import numpy as np
import pytest

from core.errors import CsvParseError, InvalidArgumentError
from core.io import (
    bar_chart,
    build_manifest,
    combine,
    dumps,
    line_chart,
    load_csv,
    load_dataset,
    result_document,
    save_csv,
    sha256_file,
    to_csv_text,
    to_jsonable,
)
from core.pca import ProxyPanel
from core.series import TimeSeries

RESPONSE = "year,temp\n1900,0.1\n1901,-0.2\n1902,0.35\n1903,0.0\n"


def test_series_round_trip_keeps_fifteen_digits(tmp_path, rng):
    values = np.array([float(f"{v:.15g}") for v in rng.normal(0, 1e3, 40)])
    path = save_csv(str(tmp_path / "s.csv"), TimeSeries(1850, values, "temp"))
    loaded = load_csv(path, "response").series
    assert loaded.start_time == 1850
    assert loaded.name == "temp"
    np.testing.assert_array_equal(loaded.values, values)


def test_missing_cells_become_nan(write_csv):
    path = write_csv("p.csv", "year,a,b\n1900,1,2\n1901,3,NA\n1902,,6\n")
    loaded = load_csv(path, "panel")
    assert loaded.panel.missing_mask.tolist() == [[False, False], [False, True], [True, False]]
    assert loaded.report.missing_counts == {"a": 1, "b": 1}


def test_response_year_gap_names_the_row(write_csv):
    path = write_csv("r.csv", "year,temp\n1900,0.1\n1902,0.2\n1903,0.3\n")
    with pytest.raises(CsvParseError) as err:
        load_csv(path, "response")
    assert err.value.row == 2
    assert err.value.column == 1


def test_panel_year_gap_is_filled(write_csv):
    path = write_csv("p.csv", "year,a\n1900,1\n1901,2\n1904,5\n")
    loaded = load_csv(path, "panel")
    assert loaded.report.inserted_years == [1902, 1903]
    assert loaded.panel.n_years == 5
    assert np.isnan(loaded.panel.values[2:4, 0]).all()


def test_header_must_start_with_year(write_csv):
    with pytest.raises(CsvParseError, match="year"):
        load_csv(write_csv("r.csv", "time,temp\n1900,0.1\n"), "response")


def test_non_numeric_cell_is_located(write_csv):
    path = write_csv("p.csv", "year,a,b\n1900,1,2\n1901,x,4\n1902,5,y\n")
    with pytest.raises(CsvParseError) as err:
        load_csv(path, "panel")
    assert (err.value.row, err.value.column) == (2, 2)
    assert [(f["row"], f["column"]) for f in err.value.failures] == [(2, 2), (3, 3)]


def test_decreasing_years_and_missing_file(write_csv, tmp_path):
    with pytest.raises(CsvParseError) as err:
        load_csv(write_csv("r.csv", "year,t\n1901,1\n1900,2\n"), "response")
    assert err.value.row == 2
    with pytest.raises(CsvParseError, match="missing file"):
        load_csv(str(tmp_path / "nope.csv"), "response")
    with pytest.raises(InvalidArgumentError):
        load_csv(write_csv("r2.csv", RESPONSE), "covariate")


def test_response_column_choice(write_csv):
    path = write_csv("r.csv", "year,a,b\n1900,1,10\n1901,2,20\n")
    assert load_csv(path, "response", column="b").series.values.tolist() == [10.0, 20.0]
    with pytest.raises(CsvParseError):
        load_csv(path, "response", column="c")


def test_combine_trims_to_common_years():
    y = TimeSeries(1850, np.arange(100.0), "temp")
    panel = ProxyPanel(1800, ("a",), np.arange(120.0)[:, None])
    data = combine(y, panel)
    assert (data.response.start_time, data.response.end_time) == (1850, 1919)
    assert data.panel.start_time == 1850 and data.panel.n_years == 70
    assert data.provenance["alignment"]["response_trimmed"] == [0, 30]
    with pytest.raises(InvalidArgumentError):
        combine(y, ProxyPanel(1700, ("a",), np.zeros((20, 1))))


def test_load_dataset_records_provenance(write_csv):
    r = write_csv("r.csv", RESPONSE)
    p = write_csv("p.csv", "year,a,b\n1901,1,2\n1902,3,5\n1903,4,4\n1904,0,1\n")
    data = load_dataset(r, p)
    assert data.response.start_time == 1901
    assert data.panel.n_years == 3
    assert data.provenance["response"]["rows_read"] == 4
    assert data.provenance["panel"]["columns"] == ["a", "b"]


def test_csv_text_uses_na_for_missing():
    text = to_csv_text(TimeSeries(2000, [1.5, np.nan], "v"))
    assert text == "year,v\n2000,1.5\n2001,NA\n"


def test_bar_chart_structure():
    svg = bar_chart(range(0, 41), np.linspace(1, 0, 41), "ACF", bound=0.1)
    assert svg.startswith("<svg")
    assert svg.count('class="bar"') == 41
    assert svg.count('class="bound"') == 2


def test_line_chart_breaks_on_missing_values():
    svg = line_chart([0, 1, 2, 3, 4], {"a": [1.0, 2.0, np.nan, 3.0, 4.0]}, "series", markers=[2])
    assert svg.count('class="line"') == 2
    assert svg.count('class="marker"') == 1


def test_jsonable_rounds_and_nulls():
    out = to_jsonable({"x": np.float64(1 / 3), "n": np.int64(4), "bad": float("nan"), "arr": np.array([1.0, np.inf])})
    assert out == {"x": 0.333333333333333, "n": 4, "bad": None, "arr": [1.0, None]}
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_result_document_is_deterministic(write_csv):
    path = write_csv("r.csv", RESPONSE)
    doc = result_document("acf", {"max_lag": 3}, {"value": math.pi}, build_manifest([path], 7, []))
    text = dumps(doc)
    assert text == dumps(result_document("acf", {"max_lag": 3}, {"value": math.pi}, build_manifest([path], 7, [])))
    parsed = json.loads(text)
    assert parsed["manifest"]["inputs"][0]["sha256"] == sha256_file(path)
    assert parsed["manifest"]["seed"] == 7
    assert set(parsed) == {"command", "params", "results", "manifest"}


def test_repeated_header_names_are_rejected(write_csv):
    path = write_csv("p.csv", "year,a,a\n1900,1,2\n1901,3,4\n")
    with pytest.raises(CsvParseError, match="repeats") as err:
        load_csv(path, "panel")
    assert err.value.row is None


def test_manifest_records_flags_and_alignment(write_csv):
    path = write_csv("r.csv", RESPONSE)
    trim = {"common_years": [1901, 1903]}
    manifest = build_manifest([path], 0, [], flags={"max_lag": 3}, alignment=trim)
    assert manifest["flags"] == {"max_lag": 3}
    assert manifest["alignment"] == trim
    assert "statsmodels" in manifest["versions"]
    assert "alignment" not in build_manifest([path], 0, [])
