"""Incidence data model and the two query oracles.

A set system over elements ``1..n`` and sets ``1..m`` is stored as two
ordered tables:

* ``elt_of[s]`` — the elements of set ``s``, in oracle order (position
  ``j`` answers "the j-th element of S_s"),
* ``set_of[e]`` — the sets containing element ``e``, in oracle order.

The two tables are dual views of the same incidence relation and every
mutation must keep them consistent.  Orderings are semantically
meaningful: a swap mutates entries in place, so position answers after a
swap differ from the canonical ascending order.

Positions are 1-based; an out-of-range position answers ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np


class SetCoverError(Exception):
    """Base class for package errors."""


class PreconditionError(SetCoverError):
    """An operation was called outside its contract; nothing was mutated."""


class BudgetExhausted(SetCoverError):
    """A query would exceed the oracle's budget; it was not answered."""


class InfeasibleError(SetCoverError):
    """No cover exists (some element lies in no available set)."""


class TooLargeError(SetCoverError):
    """Instance exceeds a solver's size cap."""


class ParseError(SetCoverError):
    """Malformed instance file."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DualityError(SetCoverError):
    """The two incidence tables disagree."""


class SetSystem:
    """Dual-table incidence structure for a set system.

    ``elt_of`` and ``set_of`` hold 1-based ids.  Canonical construction
    order is ascending within every list; swaps then mutate in place.
    """

    __slots__ = ("m", "n", "elt_of", "set_of", "meta", "set_section")

    def __init__(
        self,
        m: int,
        n: int,
        elt_of: list[list[int]],
        set_of: list[list[int]],
        meta: Optional[dict[str, str]] = None,
        set_section: bool = True,
    ):
        self.m = m
        self.n = n
        self.elt_of = elt_of  # index s-1 -> ordered element ids of set s
        self.set_of = set_of  # index e-1 -> ordered set ids containing e
        self.meta = dict(meta) if meta else {}
        # Whether a SET section was present in / should be written to files.
        self.set_section = set_section

    # -- construction -------------------------------------------------

    @classmethod
    def from_sets(cls, m: int, n: int, sets: Mapping[int, Iterable[int]]) -> "SetSystem":
        """Build a system in canonical (ascending) order from set contents."""
        elt_of: list[list[int]] = [[] for _ in range(m)]
        for sid, members in sets.items():
            if not 1 <= sid <= m:
                raise PreconditionError(f"set id {sid} outside 1..{m}")
            row = sorted(set(members))
            if row and (row[0] < 1 or row[-1] > n):
                raise PreconditionError(f"set {sid} has element outside 1..{n}")
            elt_of[sid - 1] = row
        set_of = _derive_set_of(elt_of, n)
        return cls(m, n, elt_of, set_of)

    @classmethod
    def from_incidence(cls, incidence: np.ndarray) -> "SetSystem":
        """Build from an m-by-n boolean incidence matrix, canonical order."""
        m, n = incidence.shape
        elt_of = [list(np.flatnonzero(incidence[i]) + 1) for i in range(m)]
        elt_of = [[int(e) for e in row] for row in elt_of]
        set_of = _derive_set_of(elt_of, n)
        return cls(m, n, elt_of, set_of)

    # -- views ---------------------------------------------------------

    def set_members(self, s: int) -> list[int]:
        return self.elt_of[s - 1]

    def element_sets(self, e: int) -> list[int]:
        return self.set_of[e - 1]

    def degree(self, e: int) -> int:
        return len(self.set_of[e - 1])

    def set_size(self, s: int) -> int:
        return len(self.elt_of[s - 1])

    def total_incidence(self) -> int:
        return sum(len(row) for row in self.elt_of)

    def incidence(self) -> np.ndarray:
        """m-by-n boolean incidence matrix (row s-1, column e-1)."""
        a = np.zeros((self.m, self.n), dtype=bool)
        for i, row in enumerate(self.elt_of):
            if row:
                a[i, np.asarray(row, dtype=np.int64) - 1] = True
        return a

    def copy(self) -> "SetSystem":
        return SetSystem(
            self.m,
            self.n,
            [list(row) for row in self.elt_of],
            [list(row) for row in self.set_of],
            dict(self.meta),
            self.set_section,
        )

    def rebuild_set_of(self) -> list[list[int]]:
        """Recompute set_of from elt_of with ascending set ids (for checks)."""
        return _derive_set_of(self.elt_of, self.n)

    def check_duality(self) -> None:
        """Raise DualityError unless the two tables describe one relation."""
        pairs_elt = set()
        for i, row in enumerate(self.elt_of):
            if len(row) != len(set(row)):
                raise DualityError(f"set {i + 1} lists a duplicate element")
            for e in row:
                if not 1 <= e <= self.n:
                    raise DualityError(f"set {i + 1} lists element {e} outside 1..{self.n}")
                pairs_elt.add((i + 1, e))
        pairs_set = set()
        for j, row in enumerate(self.set_of):
            if len(row) != len(set(row)):
                raise DualityError(f"element {j + 1} lists a duplicate set")
            for s in row:
                if not 1 <= s <= self.m:
                    raise DualityError(f"element {j + 1} lists set {s} outside 1..{self.m}")
                pairs_set.add((s, j + 1))
        if pairs_elt != pairs_set:
            diff = pairs_elt.symmetric_difference(pairs_set)
            s, e = sorted(diff)[0]
            raise DualityError(f"tables disagree on (set {s}, element {e})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SetSystem):
            return NotImplemented
        return (
            self.m == other.m
            and self.n == other.n
            and self.elt_of == other.elt_of
            and self.set_of == other.set_of
        )

    def __repr__(self) -> str:
        return f"SetSystem(m={self.m}, n={self.n}, incidence={self.total_incidence()})"


def _derive_set_of(elt_of: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    set_of: list[list[int]] = [[] for _ in range(n)]
    for i, row in enumerate(elt_of):
        for e in row:
            set_of[e - 1].append(i + 1)
    # Ascending set ids per element: rows were scanned in id order already,
    # so each list is sorted; keep it explicit for mutated inputs.
    for lst in set_of:
        lst.sort()
    return set_of


class Oracle:
    """Query-counted read view over a SetSystem.

    Each answered query increments exactly one counter by exactly one.
    With a budget set, a query that would push the total past the budget
    raises BudgetExhausted without being answered or counted.
    """

    __slots__ = ("system", "elt_of_queries", "set_of_queries", "budget")

    def __init__(self, system: SetSystem, budget: Optional[int] = None):
        self.system = system
        self.elt_of_queries = 0
        self.set_of_queries = 0
        self.budget = budget

    def total_queries(self) -> int:
        return self.elt_of_queries + self.set_of_queries

    def _charge_elt(self, count: int = 1) -> None:
        if self.budget is not None and self.total_queries() + count > self.budget:
            allowed = self.budget - self.total_queries()
            self.elt_of_queries += max(allowed, 0)
            raise BudgetExhausted(f"budget {self.budget} reached")
        self.elt_of_queries += count

    def _charge_set(self, count: int = 1) -> None:
        if self.budget is not None and self.total_queries() + count > self.budget:
            allowed = self.budget - self.total_queries()
            self.set_of_queries += max(allowed, 0)
            raise BudgetExhausted(f"budget {self.budget} reached")
        self.set_of_queries += count

    def elt_of(self, s: int, j: int) -> Optional[int]:
        """The j-th element of set s, or None past the end of the set."""
        if not 1 <= s <= self.system.m:
            raise PreconditionError(f"set id {s} outside 1..{self.system.m}")
        if j < 1:
            raise PreconditionError(f"position {j} < 1")
        self._charge_elt()
        row = self.system.elt_of[s - 1]
        return row[j - 1] if j <= len(row) else None

    def set_of(self, e: int, j: int) -> Optional[int]:
        """The j-th set containing element e, or None past its degree."""
        if not 1 <= e <= self.system.n:
            raise PreconditionError(f"element id {e} outside 1..{self.system.n}")
        if j < 1:
            raise PreconditionError(f"position {j} < 1")
        self._charge_set()
        row = self.system.set_of[e - 1]
        return row[j - 1] if j <= len(row) else None

    # Bulk enumeration helpers.  These issue exactly the queries the
    # per-position loop would (|list| answers plus the terminating None)
    # and charge the counters identically; they exist so large runs are
    # not dominated by Python call overhead.

    def enumerate_set(self, s: int) -> list[int]:
        """All elements of set s via elt_of(s, 1), elt_of(s, 2), ... until None."""
        if not 1 <= s <= self.system.m:
            raise PreconditionError(f"set id {s} outside 1..{self.system.m}")
        row = self.system.elt_of[s - 1]
        self._charge_elt(len(row) + 1)
        return list(row)

    def enumerate_element(self, e: int) -> list[int]:
        """All sets containing e via set_of(e, 1), set_of(e, 2), ... until None."""
        if not 1 <= e <= self.system.n:
            raise PreconditionError(f"element id {e} outside 1..{self.system.n}")
        row = self.system.set_of[e - 1]
        self._charge_set(len(row) + 1)
        return list(row)


@dataclass
class Cover:
    """A collection of distinct set ids claimed to cover the universe."""

    set_ids: list[int]
    provenance: str = ""

    def __post_init__(self):
        if len(set(self.set_ids)) != len(self.set_ids):
            raise PreconditionError("cover contains a duplicate set id")

    def __len__(self) -> int:
        return len(self.set_ids)


@dataclass(frozen=True)
class SwapRecord:
    """The four table entries mutated by one swap.

    ``s`` gained ``e_prime`` and lost ``e``; ``s_prime`` gained ``e`` and
    lost ``e_prime``.  ``positions`` lists the modified entries as
    (table, row, index) with table in {"elt_of", "set_of"}, all 1-based.
    """

    e: int
    e_prime: int
    s: int
    s_prime: int
    positions: tuple[tuple[str, int, int], ...]

    def inverse_args(self) -> tuple[int, int, int, int]:
        """Arguments that undo this swap when passed to apply_swap."""
        return (self.e_prime, self.e, self.s, self.s_prime)


def apply_swap(sys: SetSystem, e: int, e_prime: int, s: int, s_prime: int) -> SwapRecord:
    """Exchange e in set s with e_prime in set s_prime, in place.

    Requires e in s, e not in s', e' in s', e' not in s.  Exactly two
    entries per table change; positions and all list lengths are
    preserved.  Applying the returned record's inverse restores the
    system byte for byte.
    """
    if e == e_prime or s == s_prime:
        raise PreconditionError("swap needs two distinct elements and two distinct sets")
    for x, name in ((e, "e"), (e_prime, "e_prime")):
        if not 1 <= x <= sys.n:
            raise PreconditionError(f"{name}={x} outside 1..{sys.n}")
    for x, name in ((s, "s"), (s_prime, "s_prime")):
        if not 1 <= x <= sys.m:
            raise PreconditionError(f"{name}={x} outside 1..{sys.m}")

    row_s = sys.elt_of[s - 1]
    row_sp = sys.elt_of[s_prime - 1]
    col_e = sys.set_of[e - 1]
    col_ep = sys.set_of[e_prime - 1]
    try:
        i = row_s.index(e)
    except ValueError:
        raise PreconditionError(f"element {e} not in set {s}") from None
    try:
        i_p = row_sp.index(e_prime)
    except ValueError:
        raise PreconditionError(f"element {e_prime} not in set {s_prime}") from None
    if e_prime in row_s:
        raise PreconditionError(f"element {e_prime} already in set {s}")
    if e in row_sp:
        raise PreconditionError(f"element {e} already in set {s_prime}")
    j = col_e.index(s)
    j_p = col_ep.index(s_prime)

    row_s[i] = e_prime
    row_sp[i_p] = e
    col_e[j] = s_prime
    col_ep[j_p] = s
    return SwapRecord(
        e=e,
        e_prime=e_prime,
        s=s,
        s_prime=s_prime,
        positions=(
            ("elt_of", s, i + 1),
            ("elt_of", s_prime, i_p + 1),
            ("set_of", e, j + 1),
            ("set_of", e_prime, j_p + 1),
        ),
    )


@dataclass(frozen=True)
class CoverCheck:
    covered: bool
    witness: Optional[int]  # smallest uncovered element id when not covered
    elt_of_queries: int  # queries this check issued


def verify_cover_naive(oracle: Oracle, cover: Cover) -> CoverCheck:
    """Check a claimed cover by enumerating every listed set.

    Issues exactly sum(|S_s| + 1) EltOf queries over the cover's sets and
    no SetOf queries; never early-exits, so the cost is input-determined.
    """
    n = oracle.system.n
    before = oracle.elt_of_queries
    seen = bytearray(n + 1)
    for s in cover.set_ids:
        for e in oracle.enumerate_set(s):
            seen[e] = 1
    witness = None
    for e in range(1, n + 1):
        if not seen[e]:
            witness = e
            break
    return CoverCheck(
        covered=witness is None,
        witness=witness,
        elt_of_queries=oracle.elt_of_queries - before,
    )


# -- instance files ----------------------------------------------------
#
# Text format, one record per line:
#
#   SETCOVER 1
#   m=<int> n=<int>
#   ELT
#   <set-id>: <element-id> <element-id> ...     (m lines, oracle order)
#   SET                                          (optional)
#   <element-id>: <set-id> ...                   (n lines, oracle order)
#   META key=value                               (optional, trailing)
#
# When the SET section is absent it is derived with ascending set ids per
# element.  Writing preserves list orderings exactly, so write(read(f))
# reproduces a canonical file byte for byte.

MAGIC = "SETCOVER 1"


def _format_row(head: int, ids: Sequence[int]) -> str:
    if not ids:
        return f"{head}:"
    return f"{head}: " + " ".join(str(x) for x in ids)


def write_instance(sys: SetSystem, path, set_section: Optional[bool] = None) -> None:
    """Serialize a SetSystem; orderings and META lines are preserved."""
    include_set = sys.set_section if set_section is None else set_section
    lines = [MAGIC, f"m={sys.m} n={sys.n}", "ELT"]
    for s in range(1, sys.m + 1):
        lines.append(_format_row(s, sys.elt_of[s - 1]))
    if include_set:
        lines.append("SET")
        for e in range(1, sys.n + 1):
            lines.append(_format_row(e, sys.set_of[e - 1]))
    for key, value in sys.meta.items():
        lines.append(f"META {key}={value}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_row(line: str, lineno: int, expect_head: int, id_max: int, what: str) -> list[int]:
    head, sep, rest = line.partition(":")
    if not sep:
        raise ParseError("expected '<id>: ...' row", lineno)
    try:
        head_id = int(head)
    except ValueError:
        raise ParseError(f"bad row id {head!r}", lineno) from None
    if head_id != expect_head:
        raise ParseError(f"row id {head_id}, expected {expect_head}", lineno)
    ids = []
    if rest.strip():
        for tok in rest.strip().split(" "):
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(f"bad {what} id {tok!r}", lineno) from None
            if not 1 <= v <= id_max:
                raise ParseError(f"{what} id {v} outside 1..{id_max}", lineno)
            ids.append(v)
    if len(set(ids)) != len(ids):
        raise ParseError(f"duplicate {what} id in row {expect_head}", lineno)
    return ids


def read_instance(path) -> SetSystem:
    """Parse an instance file; raises ParseError/DualityError on bad input."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0

    def need(what: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected {what}", len(lines) + 1)
        line = lines[pos]
        pos += 1
        return line

    if need("header") != MAGIC:
        raise ParseError(f"expected {MAGIC!r} header", 1)
    dims = need("dimensions")
    parts = dims.split(" ")
    if len(parts) != 2 or not parts[0].startswith("m=") or not parts[1].startswith("n="):
        raise ParseError("expected 'm=<int> n=<int>'", 2)
    try:
        m = int(parts[0][2:])
        n = int(parts[1][2:])
    except ValueError:
        raise ParseError("bad dimension integer", 2) from None
    if m < 0 or n < 0:
        raise ParseError("negative dimension", 2)
    if need("ELT section") != "ELT":
        raise ParseError("expected 'ELT'", 3)
    elt_of = []
    for s in range(1, m + 1):
        elt_of.append(_parse_row(need("ELT row"), pos, s, n, "element"))

    set_of: Optional[list[list[int]]] = None
    meta: dict[str, str] = {}
    had_set = False
    if pos < len(lines) and lines[pos] == "SET":
        pos += 1
        had_set = True
        set_of = []
        for e in range(1, n + 1):
            set_of.append(_parse_row(need("SET row"), pos, e, m, "set"))
    while pos < len(lines):
        line = need("META line")
        if not line.startswith("META "):
            raise ParseError(f"unexpected line {line!r}", pos)
        key, sep, value = line[5:].partition("=")
        if not sep or not key:
            raise ParseError("expected 'META key=value'", pos)
        meta[key] = value

    if set_of is None:
        set_of = _derive_set_of(elt_of, n)
    out = SetSystem(m, n, elt_of, set_of, meta, set_section=had_set)
    out.check_duality()
    return out
