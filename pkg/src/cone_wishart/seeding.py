"""Counter-based seeding so that chunked, threaded and serial runs agree bit for bit.

A 64-bit seed plus a (stream, chunk) counter selects an independent generator via
``SeedSequence(entropy=seed, spawn_key=(stream, chunk))``. Work is always cut into
chunks of ``CHUNK`` draws regardless of the thread count, so results depend only
on ``(seed, n_draws)``.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 4096
SEED_ENV = "CONE_WISHART_SEED"


def resolve_seed(seed=None):
    """Accept an int, a Generator (one 63-bit draw is taken) or None (env fallback, then 0)."""
    if isinstance(seed, np.random.Generator):
        return int(seed.integers(0, 2**63 - 1))
    if seed is None:
        env = os.environ.get(SEED_ENV)
        return int(env) if env is not None else 0
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream_rng(seed, *counter):
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(c) for c in counter)))


def derive_seed(seed, *counter):
    """A fresh 63-bit seed for a named sub-stream."""
    state = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(c) for c in counter)).generate_state(2, np.uint64)
    return int(state[0] >> np.uint64(1))


def chunk_sizes(n, chunk=CHUNK):
    full, rest = divmod(int(n), chunk)
    return [chunk] * full + ([rest] if rest else [])


def run_chunked(fn, n, seed, stream=0, threads=1, chunk=CHUNK):
    """Evaluate ``fn(rng, size)`` on every chunk and concatenate along axis 0 in chunk order."""
    sizes = chunk_sizes(n, chunk)
    jobs = [(stream_rng(seed, stream, j), size) for j, size in enumerate(sizes)]
    if not jobs:
        return None
    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    else:
        parts = [fn(*job) for job in jobs]
    return np.concatenate(parts, axis=0)
