"""Modified instances: swap edits that collapse the minimum cover.

Starting from an accepted median instance, k chosen sets are turned into
a cover of the universe: every element they miss is swapped in, taking
the place of an element the last chosen set shares with the other
chosen sets.  The swap partner comes from the candidate pool of sets
containing the outgoing element but not the incoming one, so every edit
touches exactly two entries per oracle table and the chosen sets end up
covering everything.

The simplified construction is the k = 2 case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import PreconditionError, SetCoverError, SetSystem, SwapRecord, apply_swap


class ConstructionStuck(SetCoverError):
    """A uniform pool ran empty mid-construction.

    Cannot happen on an instance that passed the median check; treat an
    occurrence as a checker bug signal.
    """


def candidate_sets(sys: SetSystem, e: int, e_prime: int) -> list[int]:
    """Sets containing e but not e_prime, ascending.

    The pools for (e, e') and (e', e) are disjoint by construction.
    """
    if e == e_prime:
        raise PreconditionError("candidate pool needs two distinct elements")
    with_ep = set(sys.set_of[e_prime - 1])
    return [s for s in sys.set_of[e - 1] if s not in with_ep]


@dataclass
class ModifiedInstance:
    """A median instance after its cover-collapsing swaps."""

    system: SetSystem  # mutated copy; the input median is left untouched
    chosen_sets: list[int]
    swaps: list[SwapRecord]
    matching: list[tuple[int, int]]  # (incoming e, outgoing e') pairs


def _column_bits(median: SetSystem) -> np.ndarray:
    """Boolean (n, m) membership matrix: column_bits[e-1, s-1]."""
    a = np.zeros((median.n, median.m), dtype=bool)
    for i, row in enumerate(median.elt_of):
        if row:
            a[np.asarray(row, dtype=np.int64) - 1, i] = True
    return a


def _plan_swaps(
    cols: np.ndarray, chosen: list[int], rng: np.random.Generator
) -> list[tuple[int, int, int, int]]:
    """Draw the full swap plan (e, e', candidate set, last chosen set).

    Works entirely on the unmodified membership matrix: the matched
    pairs are disjoint, so no swap changes any later pool (the candidate
    pool of a later pair involves only elements untouched by earlier
    swaps).  Drawing the outgoing elements as a uniform permutation
    prefix equals drawing them one by one from the shrinking pool.
    """
    n, m = cols.shape
    last = chosen[-1]
    member_any = np.zeros(n, dtype=bool)
    for s in chosen:
        member_any |= cols[:, s - 1]
    uncovered = np.flatnonzero(~member_any) + 1
    rest = np.zeros(n, dtype=bool)
    for s in chosen[:-1]:
        rest |= cols[:, s - 1]
    pool = np.flatnonzero(rest & cols[:, last - 1]) + 1
    if len(pool) < len(uncovered):
        raise ConstructionStuck(
            f"{len(uncovered)} uncovered elements but only {len(pool)} swap partners"
        )
    order = rng.permutation(len(pool))[: len(uncovered)]
    plan = []
    for e, pool_idx in zip(uncovered, order):
        e = int(e)
        e_p = int(pool[pool_idx])
        cand = np.flatnonzero(cols[e - 1] & ~cols[e_p - 1]) + 1
        if len(cand) == 0:
            raise ConstructionStuck(f"no candidate set for pair ({e}, {e_p})")
        s = int(cand[rng.integers(len(cand))])
        plan.append((e, e_p, s, last))
    return plan


def _gen_modified(median: SetSystem, k: int, rng: np.random.Generator) -> ModifiedInstance:
    if k < 2 or k > median.m:
        raise PreconditionError(f"k={k} outside 2..{median.m}")
    cols = _column_bits(median)
    # Ordered uniform draw: the last set of the tuple is the designated
    # swap recipient, so which member is last must itself be uniform.
    chosen = [int(s) + 1 for s in rng.permutation(median.m)[:k]]
    plan = _plan_swaps(cols, chosen, rng)
    system = median.copy()
    swaps = []
    matching = []
    for e, e_p, s, last in plan:
        # The incoming element e joins the last chosen set; the candidate
        # set s takes the outgoing element e' in its place.
        swaps.append(apply_swap(system, e, e_p, s, last))
        matching.append((e, e_p))
    return ModifiedInstance(system, chosen, swaps, matching)


def gen_modified_instance(median: SetSystem, rng: np.random.Generator) -> ModifiedInstance:
    """Collapse an accepted (simplified) median instance to a 2-set cover.

    The caller guarantees the median check passed; on such instances the
    pools are never empty and after the swaps the two chosen sets cover
    the universe while no single set does.
    """
    return _gen_modified(median, 2, rng)


def gen_modified_instance_general(
    median: SetSystem, k: int, rng: np.random.Generator
) -> ModifiedInstance:
    """Collapse a general median instance to a k-set cover."""
    return _gen_modified(median, k, rng)


def estimate_p_elt_set(
    median: SetSystem, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-cell frequency of being edited, over repeated modified draws.

    Returns an (n, m) array: entry (e-1, s-1) is the fraction of draws
    in which set s swapped element e out.  Each swap edits two cells:
    the candidate set loses the incoming element and the last chosen set
    loses the outgoing one, so frequencies are supported only on cells
    where the median has e in S and they sum to twice the mean number of
    swaps per draw.

    Draws replay the exact construction of gen_modified_instance without
    mutating anything, so large trial counts stay cheap.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    cols = _column_bits(median)
    counts = np.zeros((median.n, median.m), dtype=np.int64)
    for _ in range(trials):
        chosen = [int(s) + 1 for s in rng.permutation(median.m)[:2]]
        plan = _plan_swaps(cols, chosen, rng)
        for e, e_p, s, last in plan:
            counts[e - 1, s - 1] += 1
            counts[e_p - 1, last - 1] += 1
    return counts / float(trials)
