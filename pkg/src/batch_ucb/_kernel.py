"""Compiled replication loop.

Mirrors ``ucb_policy.play`` / ``invariant_engine.invariant_play`` operation
for operation (same draw order, same floating-point expression order) so
both engines return identical counts for a seed.
"""

import math

import numpy as np
from numba import njit

from .rng import mix_seed_u64, next_exponential, next_normal, seed_state


@njit(cache=True, nogil=True)
def simulate_block(means, d, M, D, a, K, invariant, master_seed, start, stop, counts_out):
    J = means.shape[0]
    state = np.zeros(4, dtype=np.uint64)
    zetas = np.zeros(J)
    counts = np.zeros(J, dtype=np.int64)
    sums = np.zeros(J)
    comp = np.zeros(J)
    scale = math.sqrt(M * D)
    eps = 1.0 / K
    root_eps = math.sqrt(eps)
    for rep in range(start, stop):
        seed_state(mix_seed_u64(master_seed, np.uint64(rep)), state)
        counts[:] = 0
        sums[:] = 0.0
        comp[:] = 0.0
        for batch in range(K):
            for l in range(J):
                zetas[l] = next_exponential(state)
            if batch < J:
                arm = batch
            else:
                arm = 0
                best = 0.0
                for l in range(J):
                    if invariant:
                        t_arm = counts[l] * eps
                        b = d[l] + (sums[l] + comp[l]) / t_arm + a / math.sqrt(t_arm) * (2.0 + zetas[l])
                    else:
                        b = sums[l] / counts[l] + a * scale / math.sqrt(counts[l]) * (2.0 + zetas[l])
                    if l == 0 or b > best:
                        best = b
                        arm = l
            z = next_normal(state)
            counts[arm] += 1
            if invariant:
                x = root_eps * z
                s = sums[arm]
                total = s + x
                if abs(s) >= abs(x):
                    comp[arm] += (s - total) + x
                else:
                    comp[arm] += (x - total) + s
                sums[arm] = total
            else:
                sums[arm] += M * means[arm] + scale * z
        for l in range(J):
            counts_out[rep, l] = counts[l]
