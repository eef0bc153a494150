"""Counter-based random streams for reproducible parallel Monte Carlo.

Every random quantity in the toolkit is drawn from a Philox generator keyed
by (master_seed, stream_index). Replica r of a Monte-Carlo experiment always
uses stream index r, and results are reduced in replica-index order, so the
number of workers (or the chunking of the replica range) never changes any
output bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

MASK64 = (1 << 64) - 1

DEFAULT_SEED = 0xC0FFEE
DEFAULT_REPLICAS = 10_000

# Offset separating auxiliary streams (precomputed complexities etc.) from
# replica streams 0..replicas-1 of the same master seed.
AUX_STREAM_BASE = 1 << 48


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream `index` of master seed `seed`."""
    key = np.array([seed & MASK64, index & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def replica_matrix(seed: int, replicas: int, cols: int, start: int = 0) -> np.ndarray:
    """(replicas, cols) uniforms; row r comes from stream(seed, start + r)."""
    out = np.empty((replicas, cols))
    for r in range(replicas):
        out[r] = stream(seed, start + r).random(cols)
    return out


# Replica ranges are cut into fixed-size chunks independent of the worker
# count; workers only parallelize execution of the chunk list, and results
# are concatenated in chunk order.
CHUNK = 1024


def map_replica_chunks(fn, replicas: int, workers: int = 1):
    """Apply fn(lo, hi) over fixed chunks of range(replicas), in order.

    fn must be a pure function of the half-open replica range [lo, hi).
    Returns the list of chunk results in ascending-range order regardless
    of `workers`.
    """
    chunks = [(lo, min(lo + CHUNK, replicas)) for lo in range(0, replicas, CHUNK)]
    if workers <= 1 or len(chunks) <= 1:
        return [fn(lo, hi) for lo, hi in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, lo, hi) for lo, hi in chunks]
        return [f.result() for f in futures]
