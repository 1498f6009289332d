"""Monte Carlo distinguishing experiments under a query budget.

Each experiment repeatedly draws a labeled instance from a two-way
mixture, lets a query strategy inspect a bounded number of oracle table
entries against the known unmodified baseline, and records whether the
label guess was right.  Strategies:

* "uniform"    — q entries sampled uniformly without replacement from
                 the union of both tables;
* "adaptive"   — a deterministic stub that walks the swap-witness
                 entries round-robin across slabs (or the table prefix,
                 for the median mixture) until the budget runs out;
* "exhaustive" — every entry, ignoring q.

Guessing is by likelihood under the mixture given exactly what the
probes revealed, with ties resolved to the unmodified-shaped label, so
a zero budget scores one half and full information scores one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import PreconditionError, SetSystem
from .modified import _column_bits, _plan_swaps
from .slab import _basic_slab_system, slab_swap_ids

STRATEGIES = ("uniform", "adaptive", "exhaustive")

_Z95 = 1.959963984540054


def wilson_interval(correct: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    p = correct / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = _Z95 * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return (center - half, center + half)


@dataclass(frozen=True)
class DistinguishResult:
    accuracy: float
    ci_low: float
    ci_high: float
    trials: int
    correct: int
    strategy: str
    q: int

    def ci_contains(self, p: float) -> bool:
        return self.ci_low <= p <= self.ci_high


def _entry_cells(system: SetSystem) -> tuple[np.ndarray, np.ndarray]:
    """Flatten both tables into one entry space, mapped to incidence cells.

    Entry i corresponds to cell (cell_e[i], cell_s[i]); the first block
    enumerates the per-set table row by row, the second the per-element
    table.  A query at an entry answers differently from the baseline
    exactly when its cell was edited by a swap.
    """
    es, ss = [], []
    for s in range(1, system.m + 1):
        for e in system.elt_of[s - 1]:
            es.append(e)
            ss.append(s)
    for e in range(1, system.n + 1):
        for s in system.set_of[e - 1]:
            es.append(e)
            ss.append(s)
    return np.asarray(es, dtype=np.int64), np.asarray(ss, dtype=np.int64)


class MedianVsModified:
    """Mixture: the fixed median instance vs a fresh modified draw, 50/50."""

    name = "median-vs-modified"

    def __init__(self, median: SetSystem):
        self.median = median
        self._cols = _column_bits(median)
        self._cell_e, self._cell_s = _entry_cells(median)

    @property
    def entry_count(self) -> int:
        return len(self._cell_e)

    def _draw_marks(self, rng: np.random.Generator) -> set[tuple[int, int]]:
        chosen = [int(s) + 1 for s in rng.permutation(self.median.m)[:2]]
        plan = _plan_swaps(self._cols, chosen, rng)
        marks = set()
        for e, e_p, s, last in plan:
            marks.add((e, s))
            marks.add((e_p, last))
        return marks

    def run_trial(self, strategy: str, q: int, rng: np.random.Generator) -> bool:
        modified = bool(rng.random() < 0.5)
        marks = self._draw_marks(rng) if modified else None
        total = self.entry_count
        if strategy == "exhaustive":
            probes = np.arange(total)
        elif strategy == "adaptive":
            probes = np.arange(min(q, total))
        else:
            probes = rng.choice(total, size=min(q, total), replace=False)
        evidence = False
        if modified and len(probes):
            for idx in probes:
                if (int(self._cell_e[idx]), int(self._cell_s[idx])) in marks:
                    evidence = True
                    break
        guess_modified = evidence  # absent evidence, the median is the MAP guess
        return guess_modified == modified


class SlabYesNo:
    """Mixture: slab instances, all-slabs-swapped vs one-slab-unswapped, 50/50."""

    name = "slab-yes-no"

    def __init__(self, n: int, k: int):
        basic = _basic_slab_system(n, k)
        self.n, self.k = n, k
        self.q_slab = n // k
        self.swaps_per_slab = n - k  # k * (n/k - 1)
        cell_e, cell_s = _entry_cells(basic)
        # Witness map: entry index -> (slab, swap code) or -1.  Each of a
        # swap's four modified entries witnesses exactly that swap.
        witness = np.full(len(cell_e), -1, dtype=np.int64)
        cell_index: dict[tuple[int, int], list[int]] = {}
        for i, (e, s) in enumerate(zip(cell_e.tolist(), cell_s.tolist())):
            cell_index.setdefault((e, s), []).append(i)
        for slab in range(1, k + 1):
            for x in range(1, k + 1):
                for y in range(1, self.q_slab):
                    e, e_p, s, s_p = slab_swap_ids(n, k, slab, x, y)
                    code = (slab - 1) * self.swaps_per_slab + (x - 1) * (self.q_slab - 1) + (y - 1)
                    for cell in ((e, s), (e_p, s_p)):
                        for i in cell_index[cell]:
                            witness[i] = code
        self._witness = witness
        # Probe order for the adaptive stub: walk slabs round-robin, one
        # yet-unprobed swap witness per step (the per-set table entry).
        by_swap_entry = np.full(k * self.swaps_per_slab, -1, dtype=np.int64)
        for i, code in enumerate(witness.tolist()):
            if code >= 0 and by_swap_entry[code] < 0:
                by_swap_entry[code] = i
        order = []
        for r in range(self.swaps_per_slab):
            for slab in range(k):
                order.append(by_swap_entry[slab * self.swaps_per_slab + r])
        self._adaptive_order = np.asarray(order, dtype=np.int64)

    @property
    def entry_count(self) -> int:
        return len(self._witness)

    def run_trial(self, strategy: str, q: int, rng: np.random.Generator) -> bool:
        k, s_count = self.k, self.swaps_per_slab
        xs = rng.integers(1, k + 1, size=k)
        ys = rng.integers(1, self.q_slab, size=k)
        codes = (np.arange(k) * s_count + (xs - 1) * (self.q_slab - 1) + (ys - 1)).astype(
            np.int64
        )
        if rng.random() < 0.5:
            label_yes = False
            unswapped = int(rng.integers(k))
            codes[unswapped] = -1
        else:
            label_yes = True

        total = self.entry_count
        if strategy == "exhaustive":
            probes = np.arange(total)
        elif strategy == "adaptive":
            probes = self._adaptive_order[: min(q, len(self._adaptive_order))]
        else:
            probes = rng.choice(total, size=min(q, total), replace=False)

        seen = self._witness[probes]
        seen = seen[seen >= 0]
        found = np.zeros(k, dtype=bool)
        excluded: list[set[int]] = [set() for _ in range(k)]
        for code in seen.tolist():
            slab = code // s_count
            if codes[slab] == code:
                found[slab] = True
            else:
                excluded[slab].add(code)

        # Likelihood of the observations per slab, under "this slab was
        # swapped uniformly" vs "this slab was left unswapped".
        p_swapped = np.empty(k)
        p_plain = np.empty(k)
        for slab in range(k):
            if found[slab]:
                p_swapped[slab] = 1.0 / s_count
                p_plain[slab] = 0.0
            else:
                p_swapped[slab] = (s_count - len(excluded[slab])) / s_count
                p_plain[slab] = 1.0
        like_yes = float(np.prod(p_swapped))
        like_no = 0.0
        for slab in range(k):
            rest = like_yes / p_swapped[slab] if p_swapped[slab] > 0 else float(
                np.prod(np.delete(p_swapped, slab))
            )
            like_no += p_plain[slab] * rest
        like_no /= k
        guess_yes = like_yes >= like_no
        return guess_yes == label_yes


def distinguisher_experiment(
    gen,
    strategy: str,
    q: int,
    trials: int,
    rng: np.random.Generator,
) -> DistinguishResult:
    """Estimate a strategy's label accuracy over a labeled mixture.

    ``gen`` is a MedianVsModified or SlabYesNo distribution; q is the
    entry budget per trial (ignored by "exhaustive").  Returns the
    accuracy with a 95% binomial confidence interval.
    """
    if strategy not in STRATEGIES:
        raise PreconditionError(f"strategy must be one of {STRATEGIES}")
    if q < 0:
        raise PreconditionError("q must be >= 0")
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    correct = 0
    for _ in range(trials):
        correct += bool(gen.run_trial(strategy, q, rng))
    lo, hi = wilson_interval(correct, trials)
    return DistinguishResult(correct / trials, lo, hi, trials, correct, strategy, q)
