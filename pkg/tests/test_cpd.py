import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memleak.core import TimeSeries
from memleak.cpd import candidate_indexes, change_points
from memleak.errors import EmptySeries
from oracles import change_points_bruteforce


def five_minute(values):
    values = np.asarray(values, dtype=float)
    return TimeSeries("c", 300 * np.arange(values.size), values)


@pytest.mark.parametrize("n", [2, 3, 50, 500])
def test_constant_series_only_endpoints(n):
    assert change_points(five_minute([42.0] * n)) == [0, n - 1]


def test_single_point():
    assert change_points(five_minute([1.0])) == [0]


def test_empty_raises():
    with pytest.raises(EmptySeries):
        change_points(TimeSeries.empty())


def test_single_jump():
    ts = five_minute([10.0] * 100 + [90.0] * 100)
    expected = change_points_bruteforce(ts.timestamps.tolist(), ts.values.tolist(), 3.0, 6 * 3600)
    assert expected == [0, 100, 199]
    assert change_points(ts, 3.0, 6 * 3600) == expected


def test_spacing_is_greedy_from_the_start():
    values = [0.0] * 30
    for i in (5, 8, 20):
        values[i:] = [v + 50 for v in values[i:]]
    ts = five_minute(values)
    assert change_points(ts, 2.0, 0) == [0, 5, 8, 20, 29]
    # 5 and 8 are 900 s apart; 8 is dropped at 1000 s spacing, 20 survives
    assert change_points(ts, 2.0, 1000) == [0, 5, 20, 29]
    # a candidate closer than min_spacing to index 0 is dropped
    assert change_points(ts, 2.0, 1600) == [0, 8, 20, 29]


def test_last_index_always_present():
    ts = five_minute([0.0] * 20 + [80.0])
    assert change_points(ts, 3.0, 10**9) == [0, 20]


def random_walk(seed, n):
    rng = np.random.default_rng(seed)
    return 50 + np.cumsum(rng.normal(0, 1, n))


@pytest.mark.parametrize("seed", range(20))
def test_random_walk_matches_oracle(seed):
    ts = five_minute(random_walk(seed, 300))
    for z, spacing in ((3.0, 3600), (2.0, 0), (1.5, 6 * 3600)):
        expected = change_points_bruteforce(ts.timestamps.tolist(), ts.values.tolist(), z, spacing)
        assert change_points(ts, z, spacing) == expected


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0, 100, allow_nan=False), min_size=2, max_size=200),
    st.floats(0.5, 4.0),
    st.floats(0.01, 1000).filter(lambda c: abs(c - 1) > 1e-6),
)
def test_candidates_scale_invariant(values, z, c):
    x = np.array(values)
    assert np.array_equal(candidate_indexes(x, z), candidate_indexes(x * c, z))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(-40, 40))
def test_value_shift_invariant(seed, c):
    ts = five_minute(random_walk(seed, 200))
    assert change_points(ts.shifted(dv=c), 3.0, 3600) == change_points(ts, 3.0, 3600)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=100), st.floats(0, 5000))
def test_output_structure(values, spacing):
    ts = five_minute(values)
    cps = change_points(ts, 3.0, spacing)
    assert cps[0] == 0 and cps[-1] == len(values) - 1
    assert all(a < b for a, b in zip(cps, cps[1:]))
    interior = cps[:-1]
    assert all(ts.timestamps[b] - ts.timestamps[a] >= spacing for a, b in zip(interior, interior[1:]))
