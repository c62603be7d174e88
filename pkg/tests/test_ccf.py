import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.ccf import CcfResult, cross_correlation, prewhitened_ccf, significant_lags
from core.errors import DegenerateSeriesError, InvalidArgumentError
from core.pca import decompose, score_series
from core.series import TimeSeries
from core.simulate import independent_pair, lagged_factor_panel


def _white_pair(seed, n):
    rng = np.random.default_rng(seed)
    return TimeSeries(0, rng.standard_normal(n), "x"), TimeSeries(0, rng.standard_normal(n), "y")


def test_series_with_itself_peaks_at_zero(white_noise):
    r = cross_correlation(white_noise, white_noise, 10)
    assert r.at(0) == pytest.approx(1.0, abs=1e-12)
    assert r.lags.tolist() == list(range(-10, 11))
    assert r.bound == pytest.approx(1.96 / np.sqrt(300))


def test_positive_lag_means_x_leads():
    rng = np.random.default_rng(3)
    x = TimeSeries(0, rng.standard_normal(400), "x")
    y = TimeSeries(0, np.concatenate([rng.standard_normal(5), x.values[:-5]]), "y")
    r = cross_correlation(x, y, 10)
    assert int(r.lags[np.argmax(r.correlations)]) == 5
    assert r.at(5) > 0.9


def test_swapping_series_mirrors_lags(rng):
    x = TimeSeries(0, rng.standard_normal(120))
    y = TimeSeries(0, np.cumsum(rng.standard_normal(120)))
    a, b = cross_correlation(x, y, 8), cross_correlation(y, x, 8)
    np.testing.assert_allclose(a.correlations, b.correlations[::-1], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.1, max_value=50), st.floats(min_value=-100, max_value=100),
       st.integers(min_value=0, max_value=2**31))
def test_affine_changes_leave_ccf_alone(scale, shift, seed):
    x, y = _white_pair(seed, 80)
    base = cross_correlation(x, y, 6).correlations
    moved = cross_correlation(x.with_values(scale * x.values + shift), y, 6).correlations
    np.testing.assert_allclose(moved, base, atol=1e-9)


def test_only_overlapping_years_are_used(rng):
    x = TimeSeries(1800, rng.standard_normal(200))
    y = TimeSeries(1850, rng.standard_normal(100))
    r = cross_correlation(x, y, 5)
    assert r.n == 100
    assert r.start_time == 1850


def test_ccf_preconditions(rng):
    x = TimeSeries(0, rng.standard_normal(30))
    with pytest.raises(InvalidArgumentError):
        cross_correlation(x, x, 0)
    with pytest.raises(InvalidArgumentError):
        cross_correlation(x, x, 25)
    with pytest.raises(DegenerateSeriesError):
        cross_correlation(x, TimeSeries(0, np.ones(30)), 5)
    with pytest.raises(InvalidArgumentError):
        cross_correlation(x, TimeSeries(100, rng.standard_normal(30)), 5)
    with pytest.raises(InvalidArgumentError):
        prewhitened_ccf(x, x, 5, mode="sideways")


def _result(correlations, bound=0.2):
    lags = np.arange(-(len(correlations) // 2), len(correlations) // 2 + 1)
    return CcfResult(lags, np.asarray(correlations, dtype=float), 100, bound)


def test_significant_lags_ordering():
    r = _result([0.1, -0.5, 0.3, 0.5, 0.25])
    assert significant_lags(r) == [(-1, -0.5), (1, 0.5), (0, 0.3), (2, 0.25)]


def test_significant_lags_tie_goes_to_smaller_lag_then_negative():
    r = _result([0.4, 0.0, 0.0, 0.0, 0.4])
    assert [h for h, _ in significant_lags(r)] == [-2, 2]
    r = _result([0.4, 0.0, 0.0, 0.4, 0.0])
    assert [h for h, _ in significant_lags(r)] == [1, -2]


def test_nothing_above_the_bound():
    assert significant_lags(_result([0.1, -0.2, 0.05])) == []


def test_prewhitening_white_x_barely_changes_ccf():
    x, y = _white_pair(11, 500)
    raw = cross_correlation(x, y, 10)
    pw = prewhitened_ccf(x, y, 10, 1, 1)
    assert pw.mode == "prewhitened-x"
    assert pw.selected_order is not None
    if pw.selected_order == (0, 0):
        np.testing.assert_allclose(pw.correlations, raw.correlations, atol=1e-12)
    else:
        np.testing.assert_allclose(pw.correlations, raw.correlations, atol=0.02)


def test_prewhitened_both_records_mode():
    x, y = independent_pair(4)
    r = prewhitened_ccf(x, y, 10, 1, 0, mode="prewhitened-both")
    assert r.mode == "prewhitened-both"
    assert r.lags.size == 21


def _mean_exceedance(results):
    return float(np.mean([np.mean(np.abs(r.correlations) > r.bound) for r in results]))


def test_null_exceedance_rate_of_raw_ccf():
    results = [cross_correlation(*_white_pair(s, 1000), 40) for s in range(20)]
    assert _mean_exceedance(results) == pytest.approx(0.05, abs=0.02)


@pytest.mark.slow
def test_null_exceedance_rate_of_raw_ccf_full_scale():
    results = [cross_correlation(*_white_pair(s, 1000), 40) for s in range(200)]
    assert _mean_exceedance(results) == pytest.approx(0.05, abs=0.02)


def _spurious_experiment(seeds, p_max, q_max):
    any_hit, pw_results = 0, []
    for seed in seeds:
        x, y = independent_pair(seed)
        any_hit += bool(significant_lags(cross_correlation(x, y, 20)))
        pw_results.append(prewhitened_ccf(x, y, 20, p_max, q_max))
    return any_hit / len(seeds), _mean_exceedance(pw_results)


def test_raw_ccf_of_persistent_x_finds_spurious_lags():
    raw_rate, pw_rate = _spurious_experiment(range(20), 1, 1)
    assert raw_rate >= 0.3
    assert pw_rate == pytest.approx(0.05, abs=0.025)


@pytest.mark.slow
def test_spurious_lag_experiment_full_scale():
    raw_rate, pw_rate = _spurious_experiment(range(200), 2, 2)
    assert raw_rate >= 0.3
    assert pw_rate == pytest.approx(0.05, abs=0.02)


def _top_lag(seed):
    system = lagged_factor_panel(seed)
    pc = score_series(decompose(system.panel, 1), 0)
    hits = significant_lags(prewhitened_ccf(pc, system.response, 40, 2, 2))
    return hits[0][0] if hits else None


def test_factor_lag_is_the_top_prewhitened_lag():
    tops = [_top_lag(seed) for seed in range(5)]
    assert sum(t == 14 for t in tops) >= 4
