import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boomerang.reputation import (
    SEED_VALUE,
    RatingValue,
    ReputationBook,
    ReputationScore,
    seed_score,
    update_score,
)
from oracles import fold_score

ratings = st.lists(st.sampled_from([1, 2, 3]), max_size=60)
decays = st.floats(0.01, 1.0)


def test_seed_is_just_under_check():
    assert seed_score().value == 1.99
    assert seed_score().n_observations == 0
    assert seed_score() == seed_score()


def test_single_check_raises_seed():
    assert update_score(seed_score(), RatingValue.CHECK).value > SEED_VALUE


def test_check_is_fixed_point():
    assert update_score(ReputationScore(2.0, 5), RatingValue.CHECK).value == 2.0


def test_plus_from_seed():
    assert math.isclose(update_score(seed_score(), RatingValue.PLUS).value, 2.293, abs_tol=1e-12)


def test_plus_stream_converges_monotonically():
    s = seed_score()
    prev = s.value
    for _ in range(200):
        s = update_score(s, RatingValue.PLUS)
        assert s.value >= prev
        prev = s.value
    assert 3.0 - s.value < 1e-9


def test_score_rejects_out_of_range():
    with pytest.raises(ValueError):
        ReputationScore(3.5)


def test_symbols():
    assert [v.symbol for v in RatingValue] == ["✓-", "✓", "✓+"]


@given(ratings, decays)
def test_bounds(seq, decay):
    s = seed_score()
    for r in seq:
        s = update_score(s, r, decay)
        assert 1.0 <= s.value <= 3.0


@given(ratings, decays)
def test_incremental_equals_fold(seq, decay):
    book = ReputationBook(decay)
    for i, r in enumerate(seq):
        book.rate(i % 3, 7, r)
    assert book.global_rating(7) == fold_score(seq, decay)
    assert book.score(7).n_observations == len(seq)


@given(st.floats(1.0, 3.0), st.sampled_from([1, 2, 3]), decays)
def test_update_moves_toward_rating(v, r, decay):
    s = ReputationScore(v)
    if v != r:
        assert abs(update_score(s, r, decay).value - r) < abs(v - r)


@given(st.floats(1.0, 3.0), st.integers(1, 20))
def test_plus_beats_check(v, k):
    a = b = ReputationScore(v)
    for _ in range(k):
        a = update_score(a, RatingValue.PLUS)
        b = update_score(b, RatingValue.CHECK)
    assert a.value > b.value


def test_pairwise_last_write_wins():
    book = ReputationBook()
    assert book.pairwise_rating(1, 2) is None
    book.rate(1, 2, RatingValue.PLUS)
    assert book.pairwise_rating(1, 2) is RatingValue.PLUS
    book.rate(1, 2, RatingValue.MINUS)
    assert book.pairwise_rating(1, 2) is RatingValue.MINUS
    # both ratings still count toward the global score
    assert book.global_rating(2) == fold_score([3, 1])


def test_effective_rating():
    book = ReputationBook()
    assert book.effective_rating(0, 9) == 1.99
    book.rate(0, 9, RatingValue.PLUS)
    for _ in range(10):
        book.rate(1, 9, RatingValue.MINUS)
    assert book.effective_rating(0, 9) == 3.0
    assert book.effective_rating(2, 9) == book.global_rating(9)


def test_effective_rating_passes_global_through():
    book = ReputationBook(scores={4: ReputationScore(2.4, 3)})
    assert book.effective_rating(0, 4) == 2.4


def test_rated_by():
    book = ReputationBook()
    book.rate(0, 1, 3)
    book.rate(0, 2, 1)
    book.rate(5, 1, 2)
    assert book.rated_by(0) == {1: RatingValue.PLUS, 2: RatingValue.MINUS}


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.sampled_from([1, 2, 3])), max_size=40))
def test_pairs_match_last_rating(log):
    book = ReputationBook()
    for rater, ratee, v in log:
        book.rate(rater, ratee, v)
    last = {}
    for rater, ratee, v in log:
        last[(rater, ratee)] = v
    assert {k: int(v) for k, v in book.pairs.items()} == last
