import numpy as np
import pytest
from hypothesis import given, strategies as st

from labelqm import rng as rngmod


def test_seed_range():
    for bad in (-1, 2**64, 1.5, "3", True):
        with pytest.raises((ValueError, TypeError)):
            rngmod.check_seed(bad)
    assert rngmod.check_seed(2**64 - 1) == 2**64 - 1


@given(st.integers(1, 100_000), st.integers(1, 5000))
def test_chunk_sizes(n, size):
    c = rngmod.chunk_sizes(n, size)
    assert sum(c) == n and all(0 < x <= size for x in c)


def test_streams_independent_and_stable():
    a = rngmod.stream(5, rngmod.PROTOCOL, 0).random(4)
    assert np.array_equal(a, rngmod.stream(5, rngmod.PROTOCOL, 0).random(4))
    assert not np.array_equal(a, rngmod.stream(5, rngmod.PROTOCOL, 1).random(4))
    assert not np.array_equal(a, rngmod.stream(5, rngmod.PAIR, 0).random(4))


def test_run_chunks_worker_invariant():
    work = lambda g, c, s: g.integers(0, 1000, size=s)
    a = np.concatenate(rngmod.run_chunks(70_000, 9, rngmod.PROTOCOL, work, workers=1))
    b = np.concatenate(rngmod.run_chunks(70_000, 9, rngmod.PROTOCOL, work, workers=3))
    assert np.array_equal(a, b)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8).filter(lambda p: sum(p) > 0))
def test_categorical_support(p):
    p = np.array(p) / sum(p)
    k = rngmod.categorical(np.random.default_rng(0), p, 500)
    assert np.all(p[k] > 0)
