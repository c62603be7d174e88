import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.arma import ArmaModel, simulate
from core.errors import DegenerateSeriesError, EmptySeriesError, InvalidArgumentError
from core.series import (
    TimeSeries,
    durbin_levinson,
    difference,
    linear_filter,
    ljung_box,
    overlap,
    sample_acf,
    sample_pacf,
    summary_stats,
)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


def test_timeseries_rejects_empty_and_infinite():
    with pytest.raises(InvalidArgumentError):
        TimeSeries(0, [])
    with pytest.raises(InvalidArgumentError):
        TimeSeries(0, [1.0, np.inf])


def test_start_time_must_be_a_whole_year():
    assert TimeSeries(np.int64(1850), [1.0]).start_time == 1850
    assert TimeSeries(1850.0, [1.0]).start_time == 1850
    for bad in (1850.7, float("nan"), "soon", None):
        with pytest.raises(InvalidArgumentError, match="whole year"):
            TimeSeries(bad, [1.0])


def test_timeseries_tracks_missing_and_windows():
    s = TimeSeries(1850, [1.0, np.nan, 3.0, 4.0], "t")
    assert s.end_time == 1853
    assert s.n_observed == 3
    assert not s.is_complete
    assert s.window(1852, 1853).values.tolist() == [3.0, 4.0]
    assert np.isnan(s.value_at(1900))
    with pytest.raises(ValueError):
        s.values[0] = 9.0


def test_pandas_round_trip_keeps_year_axis():
    s = TimeSeries(1900, [0.5, 1.5, 2.5], "temp")
    back = TimeSeries.from_pandas(s.to_pandas())
    assert back.start_time == 1900
    assert back.name == "temp"
    np.testing.assert_array_equal(back.values, s.values)


def test_overlap_of_disjoint_series_is_an_error():
    with pytest.raises(InvalidArgumentError):
        overlap(TimeSeries(0, [1.0, 2.0]), TimeSeries(10, [1.0, 2.0]))
    assert overlap(TimeSeries(0, np.ones(5)), TimeSeries(3, np.ones(5))) == (3, 4)


def test_difference_examples():
    np.testing.assert_array_equal(difference(TimeSeries(0, [2.0] * 4)).values, [0.0, 0.0, 0.0])
    d = difference(TimeSeries(1850, [1.0, 3.0, 6.0, 10.0]))
    assert d.values.tolist() == [2.0, 3.0, 4.0]
    assert d.start_time == 1851


def test_difference_of_linear_trend_is_constant():
    t = np.arange(200)
    d = difference(TimeSeries(0, 0.3 + 0.7 * t))
    np.testing.assert_allclose(d.values, 0.7, atol=1e-12)


def test_difference_propagates_missing_and_checks_length():
    d = difference(TimeSeries(0, [1.0, np.nan, 3.0, 4.0]))
    assert np.isnan(d.values[:2]).all()
    assert d.values[2] == 1.0
    with pytest.raises(InvalidArgumentError):
        difference(TimeSeries(0, [1.0, 2.0]), lag=2)


@given(st.lists(finite, min_size=4, max_size=60))
def test_second_difference_matches_filter(values):
    s = TimeSeries(5, values)
    twice = difference(difference(s, 1), 1)
    filtered = linear_filter(s, [1.0, -2.0, 1.0])
    assert twice.start_time == filtered.start_time
    np.testing.assert_allclose(twice.values, filtered.values, atol=1e-12 * max(1.0, np.max(np.abs(values))) * 4)


def test_acf_lag_zero_and_bound(white_noise):
    acf = sample_acf(white_noise, 40)
    assert acf.correlations[0] == 1.0
    assert acf.bound == pytest.approx(1.96 / np.sqrt(300))
    assert np.all(np.abs(acf.correlations) <= 1.0)
    assert acf.lags.tolist() == list(range(41))


def test_acf_of_constant_series_is_degenerate():
    with pytest.raises(DegenerateSeriesError):
        sample_acf(TimeSeries(0, np.full(20, 3.25)), 5)


def test_acf_rejects_bad_max_lag(white_noise):
    with pytest.raises(InvalidArgumentError):
        sample_acf(white_noise, 0)
    with pytest.raises(InvalidArgumentError):
        sample_acf(white_noise, len(white_noise))


@settings(max_examples=40, deadline=None)
@given(a=st.floats(min_value=0.01, max_value=100) | st.floats(min_value=-100, max_value=-0.01),
       b=st.floats(min_value=-1e3, max_value=1e3), seed=st.integers(0, 2**16))
def test_acf_is_affine_invariant(a, b, seed):
    x = np.random.default_rng(seed).standard_normal(120)
    base = sample_acf(TimeSeries(0, x), 20).correlations
    moved = sample_acf(TimeSeries(0, a * x + b), 20).correlations
    np.testing.assert_allclose(moved, base, atol=1e-10)


def test_acf_of_unit_root_ma_matches_closed_form():
    s = simulate(ArmaModel((), (-1.0,)), 100_000, seed=11, allow_unit_root_ma=True)
    acf = sample_acf(s, 40)
    assert acf.at(1) == pytest.approx(-0.5, abs=0.02)
    tail = np.abs(acf.correlations[4:41])
    # Bartlett variance beyond lag 1 is 1.5/n here, so about 89% of lags sit inside 1.96/sqrt(n)
    assert np.mean(tail < acf.bound) >= 0.75
    assert tail.max() < 0.02


def test_acf_uses_pairwise_deletion_with_observed_count():
    x = np.random.default_rng(3).standard_normal(50)
    x[[4, 17]] = np.nan
    acf = sample_acf(TimeSeries(0, x), 5)
    assert acf.n == 48
    assert acf.bound == pytest.approx(1.96 / np.sqrt(48))


def _exceedance_rate(seeds):
    rates = []
    for seed in seeds:
        x = np.random.default_rng(seed).standard_normal(500)
        acf = sample_acf(TimeSeries(0, x), 40)
        rates.append(np.mean(np.abs(acf.correlations[1:]) > acf.bound))
    return float(np.mean(rates))


def test_white_noise_exceedance_rate_near_five_percent():
    assert _exceedance_rate(range(40)) == pytest.approx(0.05, abs=0.025)


@pytest.mark.slow
def test_white_noise_exceedance_rate_full_scale():
    assert _exceedance_rate(range(200)) == pytest.approx(0.05, abs=0.02)


def test_pacf_of_ar1_cuts_off():
    s = simulate(ArmaModel((0.6,)), 5000, seed=4)
    pacf = sample_pacf(s, 10)
    assert pacf.partial
    assert pacf.at(1) == pytest.approx(0.6, abs=0.05)
    assert np.all(np.abs(pacf.correlations[2:]) < 3 * pacf.bound)


def test_summary_stats_examples():
    s = summary_stats(TimeSeries(0, [1.0, 2.0, 3.0]))
    assert s.mean == 2.0
    assert s.variance == pytest.approx(2.0 / 3.0)
    one = summary_stats(TimeSeries(0, [5.0]))
    assert (one.mean, one.variance) == (5.0, 0.0)
    big = summary_stats(TimeSeries(0, np.random.default_rng(0).standard_normal(10_000)))
    assert abs(big.mean) < 0.05
    assert abs(big.variance - 1.0) < 0.05


def test_summary_stats_of_all_missing_series():
    with pytest.raises(EmptySeriesError):
        summary_stats(TimeSeries(0, [np.nan, np.nan]))
    s = summary_stats(TimeSeries(0, [1.0, np.nan]))
    assert s.missing == 1


def test_ljung_box_separates_white_from_persistent():
    white = ljung_box(TimeSeries(0, np.random.default_rng(8).standard_normal(400)), 20)
    ar = ljung_box(simulate(ArmaModel((0.8,)), 400, seed=8), 20)
    assert white.dof == 20
    assert white.pvalue > 0.001
    assert ar.pvalue < 1e-6
    assert ljung_box(TimeSeries(0, np.random.default_rng(8).standard_normal(400)), 20, fitted_params=2).dof == 18


def test_ljung_box_statistic_matches_its_definition():
    s = simulate(ArmaModel((0.4,)), 300, seed=12)
    rho = sample_acf(s, 10).correlations[1:]
    n, h = len(s), np.arange(1, 11)
    result = ljung_box(s, 10, fitted_params=1)
    assert result.statistic == pytest.approx(n * (n + 2) * np.sum(rho ** 2 / (n - h)), rel=1e-10)
    assert np.isnan(ljung_box(s, 3, fitted_params=3).pvalue)


def test_ljung_box_with_gaps_uses_observed_pairs():
    values = simulate(ArmaModel((0.4,)), 300, seed=12).values.copy()
    values[[5, 77, 150]] = np.nan
    gappy = TimeSeries(0, values)
    acf = sample_acf(gappy, 10)
    h = np.arange(1, 11)
    result = ljung_box(gappy, 10)
    assert result.statistic == pytest.approx(acf.n * (acf.n + 2) * np.sum(acf.correlations[1:] ** 2 / (acf.n - h)),
                                             rel=1e-10)
    assert 0.0 <= result.pvalue <= 1.0


def test_durbin_levinson_on_exact_ar1_autocorrelations():
    pacf = durbin_levinson(0.7 ** np.arange(6))
    np.testing.assert_allclose(pacf, [0.7, 0, 0, 0, 0], atol=1e-12)
    np.testing.assert_array_equal(durbin_levinson(np.ones(4)), [1.0, 0.0, 0.0])
