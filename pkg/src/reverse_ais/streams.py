"""Reproducible random streams for independent chains.

Chains are grouped into fixed-size blocks and every block owns a PCG64
stream seeded by ``SeedSequence(master_seed, spawn_key=(*tag, block))``.
The block partition depends only on the chain count, so results do not
depend on how many workers process the blocks or in which order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

CHAIN_BLOCK = 1024


def block_rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def chain_blocks(num_chains: int, block_size: int = CHAIN_BLOCK):
    """``(block_index, count)`` pairs covering ``num_chains`` chains."""
    if num_chains < 1:
        raise ValueError("num_chains must be >= 1")
    out = []
    start = 0
    while start < num_chains:
        n = min(block_size, num_chains - start)
        out.append((len(out), n))
        start += n
    return out


def run_tasks(fn, tasks, workers: int = 1):
    """``[fn(*t) for t in tasks]``, optionally in a process pool. Output order follows ``tasks``."""
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, *zip(*tasks)))
