"""Compound instances: block-diagonal concatenations of hard parts.

A compound stitches t parts over disjoint element and set id ranges.
Each part is independently either the input median instance itself
(with a small configurable probability) or a fresh modified draw from
it.  Part i owns elements (i-1)*n+1 .. i*n and sets (i-1)*m+1 .. i*m.

Modified parts are coverable by their two chosen sets; median parts are
not pair-coverable, which is what the per-part checks certify.  The
minimum cover is therefore at least 2t + (number of median parts), with
equality in the asymptotic regime where three sets cover a median part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import PreconditionError, SetSystem
from .modified import gen_modified_instance


@dataclass(frozen=True)
class CompoundPart:
    index: int  # 1-based
    kind: str  # "median" | "modified"
    elem_offset: int  # element ids of the part are offset+1 .. offset+n
    set_offset: int
    chosen_sets: Optional[tuple[int, int]] = None  # global ids, modified parts
    swap_count: Optional[int] = None


@dataclass
class CompoundInstance:
    system: SetSystem
    parts: list[CompoundPart]
    part_m: int
    part_n: int

    @property
    def median_parts(self) -> int:
        return sum(1 for p in self.parts if p.kind == "median")

    def min_cover_lower_bound(self) -> int:
        """2 per part plus 1 per median part (tight in the dense regime)."""
        return 2 * len(self.parts) + self.median_parts


def gen_compound(
    median: SetSystem,
    t: int,
    c_weight: float,
    rng: np.random.Generator,
) -> CompoundInstance:
    """Concatenate t independent median/modified parts.

    Each part is the median itself with probability c_weight / C(m, 2),
    else a fresh modified draw.
    """
    if t < 1:
        raise PreconditionError("t must be >= 1")
    m, n = median.m, median.n
    prob = c_weight / math.comb(m, 2)
    if not 0.0 < prob <= 1.0:
        raise PreconditionError(f"median weight {prob} outside (0, 1]")
    elt_of: list[list[int]] = []
    set_of: list[list[int]] = []
    parts: list[CompoundPart] = []
    for i in range(t):
        eo, so = i * n, i * m
        if rng.random() < prob:
            src = median
            parts.append(CompoundPart(i + 1, "median", eo, so))
        else:
            draw = gen_modified_instance(median, rng)
            src = draw.system
            parts.append(
                CompoundPart(
                    i + 1,
                    "modified",
                    eo,
                    so,
                    chosen_sets=(draw.chosen_sets[0] + so, draw.chosen_sets[1] + so),
                    swap_count=len(draw.swaps),
                )
            )
        # Shift both tables verbatim: modified parts carry swapped,
        # position-significant orderings that a rebuild would destroy.
        elt_of.extend([e + eo for e in row] for row in src.elt_of)
        set_of.extend([s + so for s in row] for row in src.set_of)
    system = SetSystem(m * t, n * t, elt_of, set_of)
    return CompoundInstance(system, parts, m, n)
