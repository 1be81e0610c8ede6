import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boomerang.errors import DomainError
from boomerang.market import Market, Outcome
from boomerang.rejection import N_BUCKETS, RejectionStats, Tally, bucket_bounds, bucket_of
from drivers import random_market
from oracles import bucket_by_bounds, recount_rejection_rates


@pytest.mark.parametrize("score, bucket", [(1.0, 0), (3.0, 5), (2.0, 3), (1.99, 2), (4 / 3, 1), (8 / 3, 5)])
def test_bucket_examples(score, bucket):
    assert bucket_of(score) == bucket


@pytest.mark.parametrize("score", [0.99, 3.01, float("nan")])
def test_bucket_out_of_range(score):
    with pytest.raises(DomainError):
        bucket_of(score)


def test_bounds_tile_the_range():
    bounds = [bucket_bounds(i) for i in range(N_BUCKETS)]
    assert bounds[0][0] == 1.0 and bounds[-1][1] == 3.0
    for (_, hi), (lo, _) in zip(bounds, bounds[1:]):
        assert hi == lo


@given(st.floats(1.0, 3.0))
def test_bucket_matches_interval_scan(score):
    b = bucket_of(score)
    assert b == bucket_by_bounds(score)
    lo, hi = bucket_bounds(b)
    assert lo <= score and (score < hi or b == N_BUCKETS - 1)


def test_tally():
    t = Tally()
    assert t.rate() is None
    for rejected in (True, False, False, False):
        t.add(rejected)
    assert t.rate() == 0.25
    assert (t - Tally(1, 1)).total == 2


def _stats(rows):
    s = RejectionStats()
    for requester, worker, wb, rb, rejected in rows:
        s.record(requester, worker, wb, rb, rejected)
    return s


def test_personal_blend():
    rows = [(0, 1, 2, 2, r) for r in (True, True, False, False)]
    rows += [(0, w, 2, 2, False) for w in range(2, 12)]
    assert _stats(rows).personalized_rate(0, 1, 2, 2) == pytest.approx(0.375, abs=1e-15)


def test_bucket_proxy_without_personal_history():
    rows = [(0, w, 3, 3, w == 5) for w in range(5, 9)]
    assert _stats(rows).personalized_rate(0, 1, 3, 3) == 0.25


def test_empty_platform():
    assert RejectionStats().personalized_rate(0, 0, 2, 2) == 0.0


def test_new_requester_uses_similar_requesters():
    rows = [(1, 4, 2, 3, True), (1, 5, 2, 3, False), (2, 4, 2, 0, True)]
    s = _stats(rows)
    assert s.personalized_rate(0, 9, 2, 3) == 0.5
    # nothing in that cell: platform rate for the worker's bucket
    assert s.personalized_rate(0, 9, 2, 5) == pytest.approx(2 / 3)


def test_bucket_sensitive_view():
    rows = [(0, 1, 0, 3, True), (0, 2, 0, 3, True), (0, 3, 5, 3, False), (0, 4, 5, 3, False)]
    s = _stats(rows)
    assert s.personalized_rate(0, 9, 0, 3) == 1.0
    assert s.personalized_rate(0, 9, 5, 3) == 0.0


def test_accept_everything_is_zero_for_all():
    rows = [(0, w, w % N_BUCKETS, 2, False) for w in range(30)]
    s = _stats(rows)
    for w in range(40):
        for b in range(N_BUCKETS):
            assert s.personalized_rate(0, w, b, 2) == 0.0


def test_queries_do_not_grow_tables():
    s = RejectionStats()
    s.personalized_rate(0, 0, 1, 1)
    assert not s.by_bucket and not s.personal and not s.by_cell


reviews = st.lists(
    st.tuples(st.integers(0, 2), st.integers(0, 4), st.integers(0, 5), st.integers(0, 5), st.booleans()),
    max_size=40,
)


@given(reviews, st.integers(0, 2), st.integers(0, 4), st.integers(0, 5), st.integers(0, 5))
def test_rate_bounds(rows, r, w, wb, rb):
    assert 0.0 <= _stats(rows).personalized_rate(r, w, wb, rb) <= 1.0


@given(reviews, st.integers(0, 2), st.integers(0, 4), st.integers(0, 5), st.integers(0, 5))
def test_more_personal_rejections_never_lower_rate(rows, r, w, wb, rb):
    base = _stats(rows)
    more = _stats(rows + [(r, w, wb, rb, True)])
    # hold the bucket view fixed: compare against the same peers
    peers = base.peer_rate(r, w, wb)
    if base.personal.get((r, w)) is not None and peers is not None:
        assert more.personalized_rate(r, w, wb, rb) >= base.personalized_rate(r, w, wb, rb)


def test_rejection_display_in_market_sees_buckets():
    m = Market()
    r = m.register_requester()
    hi, lo, peer_hi, peer_lo = (m.register_worker() for _ in range(4))
    for w, value in ((hi, 3), (peer_hi, 3), (lo, 1), (peer_lo, 1)):
        for _ in range(5):
            m.rate_worker(r, w, value, 0)
    p = m.post_project(r, 4, 0)
    m.projects[p].cascade.threshold = 1.0  # fully open for this check
    for w in (peer_hi, peer_lo):
        task = m.open_task(p)
        m.accept_task(w, task, 1)
        sid = m.submit(w, task, 0.5, 1)
        m.review(r, sid, Outcome.REJECTED if w == peer_lo else Outcome.ACCEPTED, 1)
    assert m.personalized_rejection_rate(hi, r) == 0.0
    assert m.personalized_rejection_rate(lo, r) == 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_rates_match_log_recount(seed):
    m = random_market(seed, steps=250)
    queries = [(w, r) for w in m.workers for r in m.requesters]
    expected = recount_rejection_rates(m.events, queries)
    for w, r in queries:
        assert m.personalized_rejection_rate(w, r) == expected[(w, r)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_rejection_numerators_match_log(seed):
    m = random_market(seed, steps=250)
    rejected = sum(1 for ev in m.events if ev.type == "SubmissionReviewed" and ev.payload["decision"] == "Rejected")
    st_ = m.rejections
    for table in (st_.personal, st_.by_bucket, st_.by_bucket_worker, st_.by_cell, st_.by_worker_bucket, st_.by_requester):
        assert sum(t.rejected for t in table.values()) == rejected
