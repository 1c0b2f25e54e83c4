import numpy as np
import pytest
from hypothesis import given, strategies as st

from cocycle_spectra.errors import BudgetExceeded
from cocycle_spectra.symbolic import (BUDGET_ENV, BernoulliSampler, Word, enumerate_words,
                                      partition_ranges, sample_sequence, word_block)


def test_enumeration_is_lexicographic():
    words = [str(w) for w in enumerate_words(2, 3)]
    assert words == ["000", "001", "010", "011", "100", "101", "110", "111"]
    assert [str(w) for w in enumerate_words(3, 1)] == ["0", "1", "2"]
    assert list(enumerate_words(2, 0)) == [Word(())]


@given(st.integers(2, 4), st.integers(1, 6), st.integers(1, 9))
def test_partitions_cover_each_word_once(N, n, parts):
    whole = list(enumerate_words(N, n))
    pieces = [w for p in range(min(parts, N ** n)) for w in enumerate_words(N, n, p, parts)]
    assert pieces == whole


@given(st.integers(2, 5), st.integers(1, 8), st.data())
def test_rank_roundtrip(N, n, data):
    r = data.draw(st.integers(0, N ** n - 1))
    w = Word.from_rank(r, n, N)
    assert w.rank == r and len(w) == n
    assert tuple(word_block(N, n, r, r + 1)[0]) == w.symbols


def test_partition_ranges():
    assert partition_ranges(10, 3) == [(0, 3), (3, 6), (6, 10)]
    assert partition_ranges(2, 5) == [(0, 1), (1, 2)]


def test_budget(monkeypatch):
    with pytest.raises(BudgetExceeded):
        next(enumerate_words(2, 30))
    monkeypatch.setenv(BUDGET_ENV, "4")
    with pytest.raises(BudgetExceeded):
        next(enumerate_words(2, 3))
    assert len(list(enumerate_words(2, 2))) == 4
    with pytest.raises(ValueError):
        next(enumerate_words(1, 3))


def test_word_ops():
    w = Word.from_string("0110")
    assert w[1:3] == Word((1, 1)) and w[0] == 0
    assert w.reversed() == Word.from_string("0110")
    assert str(w + Word((0,))) == "01100"
    with pytest.raises(ValueError):
        Word((0, 2), 2)


def test_sampler_prefix_consistent_and_seeded():
    a = BernoulliSampler((0.3, 0.7), seed=5).sample_array(50)
    b = BernoulliSampler((0.3, 0.7), seed=5).sample_array(200)
    assert np.array_equal(a, b[:50])
    c = BernoulliSampler((0.3, 0.7), seed=6).sample_array(50)
    assert not np.array_equal(a, c)


def test_sampler_zero_weight_never_drawn():
    s = BernoulliSampler((0.0, 1.0, 0.0), seed=1)
    assert set(sample_sequence(s, 500)) == {1}


def test_sampler_frequencies():
    x = BernoulliSampler((0.25, 0.75), seed=2).sample_array(40000)
    assert abs(np.mean(x == 0) - 0.25) < 0.01


def test_sampler_validation_and_spawn():
    with pytest.raises(ValueError):
        BernoulliSampler((0.5, 0.6))
    kids = BernoulliSampler.uniform(2, 9).spawn(3)
    seqs = [k.sample_array(30) for k in kids]
    assert len({tuple(s) for s in seqs}) == 3
    again = [k.sample_array(30) for k in BernoulliSampler.uniform(2, 9).spawn(3)]
    assert all(np.array_equal(x, y) for x, y in zip(seqs, again))
