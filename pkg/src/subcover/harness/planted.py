"""Planted instances with a known optimal cover size.

The universe is partitioned into k classes (a random balanced split);
sets 1..k are the classes themselves and every further set is a strict
random subset of a single class.  No set crosses a class boundary, so
any cover needs at least one set per class, and the k class sets
suffice: the optimum is exactly k.  That makes these the ground-truth
instances for approximation-ratio and query-trend measurements.
"""

from __future__ import annotations

import numpy as np

from ..core import PreconditionError, SetSystem


def gen_planted_instance(m: int, n: int, k: int, rng: np.random.Generator) -> SetSystem:
    """Partition n elements into k classes plus m - k within-class subsets."""
    if not 1 <= k <= n:
        raise PreconditionError(f"need 1 <= k <= n (got k={k}, n={n})")
    if m < k:
        raise PreconditionError(f"need m >= k (got m={m}, k={k})")
    perm = rng.permutation(n) + 1
    bounds = [round(i * n / k) for i in range(k + 1)]
    classes = [sorted(int(e) for e in perm[bounds[i] : bounds[i + 1]]) for i in range(k)]

    sets: dict[int, list[int]] = {i + 1: classes[i] for i in range(k)}
    eligible = [i for i, c in enumerate(classes) if len(c) >= 2]
    for sid in range(k + 1, m + 1):
        if eligible:
            ci = eligible[int(rng.integers(len(eligible)))]
            cls = classes[ci]
            size = int(rng.integers(1, len(cls)))  # strict, nonempty
            idx = rng.choice(len(cls), size=size, replace=False)
            sets[sid] = sorted(cls[i] for i in idx)
        else:
            sets[sid] = []  # n == k: only empty strict subsets exist
    system = SetSystem.from_sets(m, n, sets)
    system.meta["generator"] = "planted"
    system.meta["k"] = str(k)
    return system
