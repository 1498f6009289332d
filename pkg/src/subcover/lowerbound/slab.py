"""Slab instances for the universe-coverage decision problem.

The instance has m = n sets over n elements, k | n, and splits the
elements into k slabs of q = n/k consecutive ids.  Within every slab:

* query rows: the first k sets each contain the slab's first q-1
  elements (the slab's last element is uncovered by all of them),
* swapper block y (y = 1..q-1): sets S_{y*k+1} .. S_{(y+1)*k}, each
  containing the whole slab except its y-th element.

Every set therefore holds exactly q-1 elements per slab, n-k in total.
A (x, y) swap on slab p exchanges the slab's y-th element between query
set S_x and swapper set S_{y*k+x}, handing the slab's last element to
S_x.  The k * (q-1) = n-k possible swaps of a slab modify pairwise
disjoint table entries.

Ground truth: one swap in every slab makes {S_1..S_k} cover everything
("yes"); leaving exactly one slab unswapped leaves exactly its last
element uncovered ("no").
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core import PreconditionError, SetSystem, SwapRecord, apply_swap


@dataclass
class SlabInstance:
    system: SetSystem
    n: int
    k: int
    swaps_per_slab: list[Optional[tuple[int, int]]]  # (x, y) or None, per slab
    label: Optional[str]  # "yes" | "no" | None for hand-built patterns
    unswapped_slab: Optional[int]  # 1-based slab index when label == "no"
    swap_records: list[Optional[SwapRecord]]

    @property
    def slab_size(self) -> int:
        return self.n // self.k

    def query_cover_ids(self) -> list[int]:
        """The candidate cover under test: sets 1..k."""
        return list(range(1, self.k + 1))

    def uncovered_witness(self) -> Optional[int]:
        """The one element missed by the query sets, for "no" instances."""
        if self.unswapped_slab is None:
            return None
        return self.unswapped_slab * self.slab_size


def slab_swap_ids(n: int, k: int, slab: int, x: int, y: int) -> tuple[int, int, int, int]:
    """Resolve a (x, y) swap on a slab to (e, e_prime, s, s_prime) ids.

    e is the slab's y-th element (leaving query set S_x), e_prime the
    slab's last element (entering it), s_prime the x-th set of swapper
    block y.
    """
    q = n // k
    if not 1 <= x <= k or not 1 <= y <= q - 1:
        raise PreconditionError(f"swap ({x}, {y}) outside [1..{k}] x [1..{q - 1}]")
    if not 1 <= slab <= k:
        raise PreconditionError(f"slab {slab} outside 1..{k}")
    e = (slab - 1) * q + y
    e_prime = slab * q
    return e, e_prime, x, y * k + x


def _basic_slab_system(n: int, k: int) -> SetSystem:
    """All k slabs, no swaps, canonical ascending table order."""
    q = n // k
    elt_of: list[list[int]] = []
    for sid in range(1, n + 1):
        block = (sid - 1) // k  # 0 = query rows, 1..q-1 = swapper blocks
        row = []
        for slab in range(k):
            base = slab * q
            if block == 0:
                row.extend(range(base + 1, base + q))  # first q-1 elements
            else:
                row.extend(e for e in range(base + 1, base + q + 1) if e != base + block)
        elt_of.append(row)
    set_of: list[list[int]] = [[] for _ in range(n)]
    for sid, row in enumerate(elt_of, start=1):
        for e in row:
            set_of[e - 1].append(sid)
    return SetSystem(n, n, elt_of, set_of)


def gen_slab_instance(
    n: int,
    k: int,
    label: Optional[str] = None,
    rng: Optional[np.random.Generator] = None,
    swaps: Optional[Sequence[Optional[tuple[int, int]]]] = None,
) -> SlabInstance:
    """Build a slab instance with random or explicit swaps.

    Exactly one of (label, swaps) drives the construction: label "yes"
    draws one uniform swap per slab; label "no" additionally leaves one
    uniform slab unswapped.  Explicit swaps give one (x, y) or None per
    slab and the label is derived from the pattern.
    """
    if k < 1 or n % k != 0 or n // k < 2:
        raise PreconditionError(f"need k >= 1, k | n and n/k >= 2 (got n={n}, k={k})")
    q = n // k
    if (label is None) == (swaps is None):
        raise PreconditionError("pass exactly one of label= or swaps=")
    if label is not None:
        if label not in ("yes", "no"):
            raise PreconditionError("label must be 'yes' or 'no'")
        if rng is None:
            raise PreconditionError("random construction needs rng")
        drawn: list[Optional[tuple[int, int]]] = [
            (int(rng.integers(1, k + 1)), int(rng.integers(1, q))) for _ in range(k)
        ]
        unswapped = None
        if label == "no":
            unswapped = int(rng.integers(1, k + 1))
            drawn[unswapped - 1] = None
    else:
        if len(swaps) != k:
            raise PreconditionError(f"need one swap entry per slab ({k})")
        drawn = [tuple(sw) if sw is not None else None for sw in swaps]
        missing = [i + 1 for i, sw in enumerate(drawn) if sw is None]
        if not missing:
            label, unswapped = "yes", None
        elif len(missing) == 1:
            label, unswapped = "no", missing[0]
        else:
            label, unswapped = None, None

    system = _basic_slab_system(n, k)
    records: list[Optional[SwapRecord]] = []
    for slab, sw in enumerate(drawn, start=1):
        if sw is None:
            records.append(None)
            continue
        x, y = sw
        e, e_p, s, s_p = slab_swap_ids(n, k, slab, x, y)
        records.append(apply_swap(system, e, e_p, s, s_p))
    system.meta["generator"] = "slab"
    system.meta["k"] = str(k)
    if label is not None:
        system.meta["label"] = label
    return SlabInstance(system, n, k, drawn, label, unswapped, records)
