"""Counter-based generator: scalar/vector agreement, determinism, range."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from masstransport.rng import (
    MASK,
    index_position,
    index_positions,
    mix64,
    mix64_array,
    uniform,
    uniform_block,
    uniform_column,
)

U64 = st.integers(min_value=0, max_value=MASK)


@given(U64)
def test_mix64_stays_in_range(x):
    y = mix64(x)
    assert 0 <= y <= MASK
    assert mix64(x) == y


@given(st.lists(U64, min_size=1, max_size=64))
def test_mix64_array_matches_scalar(xs):
    arr = np.array(xs, dtype=np.uint64)
    out = mix64_array(arr)
    assert out.dtype == np.uint64
    for x, y in zip(xs, out):
        assert mix64(x) == int(y)


def test_mix64_avalanche_on_adjacent_inputs():
    # Consecutive counters must map to words differing in many bits.
    for x in (0, 1, 12345, MASK - 1):
        diff = mix64(x) ^ mix64(x + 1 & MASK)
        assert bin(diff).count("1") >= 16


@given(
    st.integers(min_value=0, max_value=MASK),
    st.integers(min_value=0, max_value=1 << 20),
    st.integers(min_value=0, max_value=1 << 20),
    st.integers(min_value=-(1 << 20), max_value=1 << 20),
)
def test_scalar_uniform_is_deterministic_and_open(seed, stream, trial, pos):
    u = uniform(seed, stream, trial, index_position(pos))
    assert 0.0 < u < 1.0
    assert uniform(seed, stream, trial, index_position(pos)) == u


def test_block_matches_scalar_bit_for_bit():
    seed, stream = 42, 3
    trials = np.arange(17, dtype=np.uint64)
    positions = index_positions(-4, 7)
    block = uniform_block(seed, stream, trials, positions)
    assert block.shape == (17, 12)
    for t in range(17):
        for j, k in enumerate(range(-4, 8)):
            assert block[t, j] == uniform(seed, stream, t, index_position(k))


def test_column_matches_block_column():
    seed, stream = 9, 0
    trials = np.arange(64, dtype=np.uint64)
    positions = index_positions(0, 5)
    block = uniform_block(seed, stream, trials, positions)
    col = uniform_column(seed, stream, trials, index_position(4))
    np.testing.assert_array_equal(col, block[:, 4])


def test_index_positions_match_scalar_mapping():
    pos = index_positions(-3, 2)
    for j, k in enumerate(range(-3, 3)):
        assert int(pos[j]) == index_position(k)


def test_streams_trials_positions_all_decorrelate():
    base = uniform_block(0, 0, np.arange(8, dtype=np.uint64), index_positions(0, 8))
    other_stream = uniform_block(0, 1, np.arange(8, dtype=np.uint64), index_positions(0, 8))
    other_seed = uniform_block(1, 0, np.arange(8, dtype=np.uint64), index_positions(0, 8))
    assert not np.array_equal(base, other_stream)
    assert not np.array_equal(base, other_seed)
    assert len({float(u) for u in base.ravel()}) == base.size


def test_uniform_moments():
    block = uniform_block(7, 0, np.arange(200, dtype=np.uint64), index_positions(0, 500))
    n = block.size
    mean = block.mean()
    var = block.var()
    assert abs(mean - 0.5) < 4.0 * np.sqrt(1.0 / 12.0 / n)
    assert abs(var - 1.0 / 12.0) < 4.0 * np.sqrt(1.0 / 180.0 / n)


def test_negative_positions_are_distinct_from_positive():
    trials = np.arange(4, dtype=np.uint64)
    left = uniform_block(0, 5, trials, index_positions(-8, -1))
    right = uniform_block(0, 5, trials, index_positions(1, 8))
    assert not np.array_equal(left, right)


@pytest.mark.parametrize("k", [-(1 << 40), -1, 0, 1, 1 << 40])
def test_index_position_wraps_to_uint64(k):
    assert index_position(k) == k & MASK
