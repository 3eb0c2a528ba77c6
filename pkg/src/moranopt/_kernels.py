"""Compiled trajectory kernels and deterministic parallel RNG streams.

The generator is a splitmix64-style counter sequence: draw ``t`` of stream
``key`` is ``mix64(key + t * GOLDEN)``.  Streams are derived per run from
``(master_seed, run_index)``, so a batch of trajectories is reproducible
bit-for-bit regardless of thread count or scheduling order.

Reproducer sampling walks the cumulative fitness array against a running
total that is updated in O(1) per type flip and rebuilt from scratch every
2^20 steps to bound floating-point drift.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SALT = np.uint64(0xD1B54A32D192ED03)
_U01_SCALE = 1.0 / 9007199254740992.0  # 2**-53
_REBUILD_PERIOD = 1 << 20


@nb.njit(nb.uint64(nb.uint64), inline="always", cache=True)
def _mix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@nb.njit(nb.uint64(nb.uint64, nb.uint64), inline="always", cache=True)
def stream_key(master_seed, run_index):
    return _mix64(master_seed ^ _mix64(run_index + _SALT))


@nb.njit(nb.float64(nb.uint64, nb.uint64), inline="always", cache=True)
def _u01(key, counter):
    return (_mix64(key + counter * _GOLDEN) >> np.uint64(11)) * _U01_SCALE


@nb.njit(cache=True)
def _run_one(indptr, targets, weights, m, r, seed_bits, step_cap, key):
    """Single trajectory; returns (fixed, capped, steps)."""
    n = m.shape[0]
    x = seed_bits.copy()
    count = 0
    fit = np.empty(n, dtype=np.float64)
    for i in range(n):
        if x[i]:
            count += 1
            fit[i] = m[i]
        else:
            fit[i] = r[i]
    total = fit.sum()

    steps = np.int64(0)
    ctr = np.uint64(0)
    while 0 < count < n:
        if steps >= step_cap:
            return False, True, steps

        t = _u01(key, ctr) * total
        ctr += np.uint64(1)
        acc = 0.0
        u = n - 1
        for i in range(n):
            acc += fit[i]
            if t < acc:
                u = i
                break

        t2 = _u01(key, ctr)
        ctr += np.uint64(1)
        lo = indptr[u]
        hi = indptr[u + 1]
        v = targets[hi - 1]
        acc2 = 0.0
        for j in range(lo, hi):
            acc2 += weights[j]
            if t2 < acc2:
                v = targets[j]
                break

        if x[v] != x[u]:
            if x[u]:
                count += 1
                x[v] = 1
                total += m[v] - fit[v]
                fit[v] = m[v]
            else:
                count -= 1
                x[v] = 0
                total += r[v] - fit[v]
                fit[v] = r[v]

        steps += 1
        if steps % _REBUILD_PERIOD == 0:
            total = fit.sum()

    return count == n, False, steps


@nb.njit(parallel=True, cache=True)
def run_batch(indptr, targets, weights, m, r, seed_bits, step_cap, master_seed, n_runs):
    """Independent trajectories with per-run streams; outputs are schedule-invariant."""
    fixed = np.zeros(n_runs, dtype=np.uint8)
    capped = np.zeros(n_runs, dtype=np.uint8)
    steps = np.zeros(n_runs, dtype=np.int64)
    for i in nb.prange(n_runs):
        key = stream_key(master_seed, np.uint64(i))
        f, c, s = _run_one(indptr, targets, weights, m, r, seed_bits, step_cap, key)
        fixed[i] = 1 if f else 0
        capped[i] = 1 if c else 0
        steps[i] = s
    return fixed, capped, steps


def set_threads(n: int) -> None:
    """Clamp and apply the simulation thread count."""
    n = max(1, min(int(n), nb.config.NUMBA_NUM_THREADS))
    nb.set_num_threads(n)
