import numpy as np
import pytest

from cone_wishart.seeding import CHUNK, chunk_sizes, derive_seed, resolve_seed, run_chunked, stream_rng


def test_resolve_seed(monkeypatch):
    monkeypatch.delenv("CONE_WISHART_SEED", raising=False)
    assert resolve_seed(None) == 0
    assert resolve_seed(42) == 42
    monkeypatch.setenv("CONE_WISHART_SEED", "9")
    assert resolve_seed(None) == 9
    with pytest.raises(ValueError):
        resolve_seed(-1)


def test_streams_are_distinct_and_stable():
    a = stream_rng(5, 0, 1).random(4)
    assert np.array_equal(a, stream_rng(5, 0, 1).random(4))
    assert not np.array_equal(a, stream_rng(5, 1, 0).random(4))
    assert derive_seed(5, 1) != derive_seed(5, 2)


def test_chunking_is_thread_independent():
    assert chunk_sizes(2 * CHUNK + 3) == [CHUNK, CHUNK, 3]

    def draw(rng, size):
        return rng.standard_normal((size, 2))

    serial = run_chunked(draw, 3 * CHUNK + 10, seed=3)
    threaded = run_chunked(draw, 3 * CHUNK + 10, seed=3, threads=4)
    assert serial.shape == (3 * CHUNK + 10, 2)
    assert np.array_equal(serial, threaded)
