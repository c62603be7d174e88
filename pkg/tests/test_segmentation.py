import itertools

import numpy as np
import pytest

from core.arma import ArmaModel, simulate
from core.errors import DegenerateSeriesError, InvalidArgumentError, UnsupportedInputError
from core.segmentation import fit_segment_ar, mdl_score, segment
from core.series import TimeSeries
from core.simulate import piecewise_ar


def _best_orders(x, bounds, max_order):
    orders = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        costs = []
        for p in range(max_order + 1):
            _, _, s2 = fit_segment_ar(x[a:b], p)
            costs.append(np.log(max(p, 1)) + 0.5 * (p + 2) * np.log(b - a) + 0.5 * (b - a) * np.log(2 * np.pi * s2))
        orders.append(int(np.argmin(costs)))
    return orders


def _brute_force(series, max_breaks, max_order, min_seg_len):
    x, n = series.values, len(series)
    best = (np.inf, (), ())
    for m in range(max_breaks + 1):
        for bps in itertools.combinations(range(min_seg_len, n - min_seg_len + 1), m):
            bounds = [0, *bps, n]
            if any(b - a < min_seg_len for a, b in zip(bounds[:-1], bounds[1:])):
                continue
            orders = _best_orders(x, bounds, max_order)
            score = mdl_score(series, bps, orders)
            if score < best[0]:
                best = (score, tuple(bps), tuple(orders))
    return best


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dynamic_programme_matches_enumeration(seed):
    x = piecewise_ar(seed, n=80, break_at=40, phis=(0.8, -0.5))
    result = segment(x, max_breaks=2, max_order=2, min_seg_len=10)
    best, breakpoints, orders = _brute_force(x, 2, 2, 10)
    assert result.mdl == pytest.approx(best, abs=1e-8)
    assert tuple(result.breakpoints) == breakpoints
    assert tuple(result.orders) == orders


def test_white_single_segment_code_length(white_noise):
    x = white_noise.values
    n = x.size
    expected = 2 * np.log(n) + n / 2 * np.log(2 * np.pi * np.var(x))
    assert mdl_score(white_noise, [], [0]) == pytest.approx(expected, rel=1e-12)


def test_stored_mdl_matches_rescoring():
    x = piecewise_ar(3, n=300, break_at=150)
    result = segment(x)
    assert result.mdl == pytest.approx(mdl_score(x, result.breakpoints, result.orders), abs=1e-8)
    assert result.mdl <= min(mdl_score(x, [], [p]) for p in range(3)) + 1e-8
    assert sum(s.length for s in result.segments) == len(x)


def test_shifting_the_level_changes_nothing():
    x = piecewise_ar(4, n=300, break_at=120)
    a = segment(x)
    b = segment(x.with_values(x.values + 250.0))
    assert a.breakpoints == b.breakpoints
    assert a.orders == b.orders
    assert b.mdl == pytest.approx(a.mdl, abs=1e-6)


def _recovers_break(seed):
    result = segment(piecewise_ar(seed, n=1024, break_at=512))
    return result.m == 1 and abs(result.breakpoints[0] - 512) <= 20


def test_coefficient_switch_is_found():
    assert all(_recovers_break(seed) for seed in range(3))


@pytest.mark.slow
def test_coefficient_switch_is_found_full_scale():
    assert sum(_recovers_break(seed) for seed in range(50)) >= 45


def test_stationary_series_has_no_breaks():
    for seed in range(3):
        result = segment(simulate(ArmaModel((0.5,)), 500, seed=seed))
        assert result.m == 0


def test_splitting_iid_noise_costs_more(white_noise):
    n = len(white_noise)
    assert mdl_score(white_noise, [n // 2], [0, 0]) > mdl_score(white_noise, [], [0])


def _split_penalised(seeds, n=200):
    hits = 0
    for seed in seeds:
        x = TimeSeries(0, np.random.default_rng(seed).standard_normal(n))
        hits += mdl_score(x, [n // 2], [0, 0]) > mdl_score(x, [], [0])
    return hits


def test_splitting_iid_noise_costs_more_across_seeds():
    assert _split_penalised(range(20)) >= 19


@pytest.mark.slow
def test_splitting_iid_noise_costs_more_full_scale():
    assert _split_penalised(range(100)) >= 95


def test_break_times_follow_the_series_start():
    x = piecewise_ar(5, n=400, break_at=200, start_time=1850)
    result = segment(x)
    assert result.break_times == tuple(1850 + b for b in result.breakpoints)
    assert result.start_time == 1850


def test_segmentation_preconditions(rng):
    x = TimeSeries(0, rng.standard_normal(50))
    with pytest.raises(UnsupportedInputError):
        segment(x.with_values(np.where(np.arange(50) == 7, np.nan, x.values)))
    with pytest.raises(DegenerateSeriesError):
        segment(TimeSeries(0, np.full(50, 3.0)))
    with pytest.raises(InvalidArgumentError):
        segment(x, max_breaks=11)
    with pytest.raises(InvalidArgumentError):
        segment(x, max_order=3, min_seg_len=4)
    with pytest.raises(InvalidArgumentError):
        segment(TimeSeries(0, rng.standard_normal(8)))


def test_mdl_score_layout_checks(white_noise):
    with pytest.raises(InvalidArgumentError):
        mdl_score(white_noise, [100], [0])
    with pytest.raises(InvalidArgumentError):
        mdl_score(white_noise, [100, 50], [0, 0, 0])
    with pytest.raises(InvalidArgumentError):
        mdl_score(white_noise, [2], [2, 0])


def test_segment_fit_recovers_ar_coefficient():
    x = simulate(ArmaModel((0.6,), (), 5.0), 2000, seed=8).values
    coef, mean, sigma2 = fit_segment_ar(x, 1)
    assert coef[0] == pytest.approx(0.6, abs=0.05)
    assert mean == pytest.approx(5.0, abs=0.3)
    assert sigma2 == pytest.approx(1.0, abs=0.1)
