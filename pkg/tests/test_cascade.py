import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boomerang.cascade import CascadeState, next_threshold
from boomerang.errors import OrderingError
from drivers import ladder, run_spike_silence
from oracles import brute_utilization, brute_window_count

LAM = 0.3


def test_first_completion():
    c = CascadeState(window=10)
    c.record_completion(1)
    assert c.completions == [1]


def test_window_count():
    c = CascadeState(window=10)
    for t in (1, 2, 3, 4):
        c.record_completion(t)
    assert c.completed(0, 10) == 4
    assert c.completed(0, 4) == 3  # half-open


def test_out_of_order_completion():
    c = CascadeState()
    c.record_completion(5)
    with pytest.raises(OrderingError):
        c.record_completion(4)


def test_completion_before_queried_tick():
    c = CascadeState(window=5)
    c.utilization(12)
    with pytest.raises(OrderingError):
        c.record_completion(11)
    c.record_completion(12)


def test_utilization_drops_to_zero_after_silence():
    c = CascadeState(window=10)
    for t in (1, 2, 3, 4):
        c.record_completion(t)
    assert c.utilization(30) == 0.0
    assert c.historical_max == 4


def test_utilization_warmup_and_empty():
    c = CascadeState(window=10, t_init=3)
    assert c.utilization(12) is None
    assert c.utilization(13) == 1.0


def test_equal_counts_give_one():
    c = CascadeState(window=2)
    for t in range(10):
        c.record_completion(t)
    assert c.utilization(10) == 1.0


def test_release_picks_max_below():
    c = CascadeState(window=10)
    for t in (1, 2, 3, 4):
        c.record_completion(t)
    rel = c.maybe_release(30, [3.0, 2.4, 1.99])
    assert rel.new_threshold == 2.4 and not rel.starved
    assert c.threshold == 2.4 and c.t_init == 30 and c.historical_max == 0


def test_no_release_when_busy():
    c = CascadeState(window=2)
    for t in range(10):
        c.record_completion(t)
    assert c.maybe_release(10, [2.0]) is None
    assert c.threshold == 3.0


def test_exhaustion_opens_fully():
    c = CascadeState(window=10)
    c.record_completion(1)
    rel = c.maybe_release(30, [3.0, 3.0])
    assert rel.new_threshold == 1.0
    assert all(c.can_access(r) for r in (1.0, 1.5, 2.999, 3.0))


def test_pool_used_when_no_candidate_below():
    assert next_threshold(3.0, [3.0], [2.2, 1.7]) == 2.2
    assert next_threshold(3.0, [2.5], [2.9]) == 2.5


def test_can_access_boundaries():
    assert CascadeState().can_access(3.0)
    assert not CascadeState(threshold=2.0).can_access(1.99)
    assert CascadeState(threshold=1.0).can_access(1.0)


def test_threshold_never_rises():
    c = CascadeState(threshold=2.0)
    with pytest.raises(ValueError):
        c.apply_release(5, 2.5)


def test_starved_project_released_when_locked_out():
    c = CascadeState(window=5)
    assert c.release_decision(5, [], pool=[2.0, 1.99]) == (3.0, 2.0, 1.0, True)
    # somebody could work on it: wait
    assert c.release_decision(6, [], pool=[3.0, 1.99]) is None


def test_starved_project_released_when_platform_busy():
    c = CascadeState(window=5)
    assert c.release_decision(5, [], pool=[3.0, 1.99]) is None
    rel = c.release_decision(5, [], pool=[3.0, 1.99], platform_busy=True)
    assert rel.starved and rel.new_threshold == 1.99


def test_starvation_needs_an_empty_history():
    c = CascadeState(window=5)
    for t in range(5):
        c.record_completion(t)
    assert c.release_decision(6, [], pool=[2.0], platform_busy=True) is None


def test_bad_params():
    with pytest.raises(ValueError):
        CascadeState(window=0)
    with pytest.raises(ValueError):
        CascadeState(lam=1.0)


@st.composite
def traces(draw):
    window = draw(st.sampled_from([5, 10, 20]))
    t_init = draw(st.integers(0, 10))
    per_tick = draw(st.lists(st.integers(0, 3), min_size=1, max_size=120))
    queries = draw(st.lists(st.booleans(), min_size=len(per_tick), max_size=len(per_tick)))
    return window, t_init, per_tick, queries


@given(traces())
def test_utilization_matches_brute_force(trace):
    window, t_init, per_tick, queries = trace
    c = CascadeState(window=window, t_init=t_init)
    ticks = []
    for i, (n, q) in enumerate(zip(per_tick, queries)):
        now = t_init + i
        if q:
            assert c.utilization(now) == brute_utilization(ticks, t_init, window, now)
        for _ in range(n):
            c.record_completion(now)
            ticks.append(now)


@given(st.lists(st.floats(1.0, 3.0), min_size=2, max_size=10), st.floats(1.0, 3.0))
def test_access_monotone(ratings, threshold):
    c = CascadeState(threshold=threshold)
    for a in ratings:
        for b in ratings:
            if a >= b and c.can_access(b):
                assert c.can_access(a)


@st.composite
def spike_silence(draw):
    window = draw(st.sampled_from([5, 10, 20]))
    periods = draw(
        st.lists(
            st.tuples(st.integers(1, 30), st.integers(1, 4), st.integers(window + 1, 3 * window)),
            min_size=1,
            max_size=4,
        )
    )
    return window, periods


@settings(max_examples=150)
@given(spike_silence())
def test_spike_then_silence(trace):
    window, periods = trace
    per_period, audit = run_spike_silence(window, periods)
    assert per_period == [1] * len(periods)
    for expected, rel, before, after in audit:
        assert after <= before
        assert (rel is not None) == (expected is not None and expected <= LAM)
        if rel is not None:
            assert rel.utilization == expected


@given(st.sampled_from([5, 10, 20]), st.integers(1, 4), st.integers(30, 200))
def test_steady_work_never_releases(window, rate, horizon):
    c = CascadeState(window=window)
    for now in range(horizon):
        assert c.maybe_release(now, ladder()) is None
        for _ in range(rate):
            c.record_completion(now)
    assert c.threshold == 3.0


def test_brute_counter_half_open():
    assert brute_window_count([0, 5, 10], 0, 10) == 2
