"""Set cover solvers over the two-oracle access model.

Three query-counted algorithms are provided on top of two offline
subroutines:

* ``greedy_cover`` — the rho-approximate black box used everywhere; on a
  materialized sub-instance with n' elements it guarantees a cover of
  size at most H(n') * OPT (H = harmonic number).
* ``brute_force_min_cover`` — exact minimum cover by subset enumeration,
  used as a test oracle on small instances.
* ``iter_set_cover`` — guesses the optimum size on a geometric grid; per
  guess: sample that many sets, then repeatedly cover a uniform element
  sample offline, and finish with an offline run over the remainder.
* ``small_set_cover`` — two-stage wrapper: a coarse size estimate first,
  then iter_set_cover restricted to a narrow guess window.
* ``large_set_cover`` — never maintains uncovered elements; per guess it
  samples sets, keeps only low-degree ("rare") elements via a one-query
  size test, and solves the rare sub-instance offline.  Efficient when
  the optimum is large.
* ``sublinear_set_cover`` — routes between the two by the coarse estimate.

Query accounting is exact: every oracle read goes through the charged
Oracle interface.  Solvers are deterministic given (instance, config
seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import (
    BudgetExhausted,
    Cover,
    InfeasibleError,
    Oracle,
    PreconditionError,
    SetSystem,
    TooLargeError,
)
from .rng import stream


_HARMONIC: list[float] = [0.0]


def harmonic(n: int) -> float:
    """H(n) = sum_{i=1..n} 1/i, with H(0) = 0.  Cached prefix sums."""
    if n < 0:
        return 0.0
    h = _HARMONIC
    while len(h) <= n:
        h.append(h[-1] + 1.0 / len(h))
    return h[n]


def rho_greedy(n_prime: int) -> float:
    """Approximation factor of the greedy black box on n' elements."""
    return harmonic(n_prime) if n_prime > 0 else 1.0


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the sub-linear solvers.

    alpha trades approximation for queries (>= 2 for iter_set_cover);
    eps in (0, 1]; c_elt scales the element-sample size; c_set scales
    the size-test position.  feasibility_multiplier loosens the
    remainder threshold of iter_set_cover (1.0 = verbatim).
    """

    alpha: float = 2.0
    eps: float = 0.5
    c_elt: float = 2.0
    c_set: float = 2.0
    rho_mode: str = "greedy"
    seed: int = 0
    feasibility_multiplier: float = 1.0
    brute_force_cap: int = 24

    def __post_init__(self):
        if not self.alpha > 1:
            raise PreconditionError("alpha must be > 1")
        if not 0 < self.eps <= 1:
            raise PreconditionError("eps must be in (0, 1]")
        if self.c_elt < 1 or self.c_set < 1:
            raise PreconditionError("c_elt and c_set must be >= 1")
        if self.rho_mode not in ("greedy", "custom"):
            raise PreconditionError("rho_mode must be 'greedy' or 'custom'")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class GuessTrace:
    """Per-guess record of what iter/large set cover did."""

    ell: int
    inner_rounds: int = 0
    feasibility_tested: bool = False
    accepted: bool = False


@dataclass
class RunReport:
    """Outcome of one solver run, with exact query counts."""

    cover: Optional[Cover]
    elt_of_queries: int
    set_of_queries: int
    status: str  # "ok" | "infeasible" | "budget-exhausted"
    guesses_tried: list[int] = field(default_factory=list)
    route: Optional[str] = None
    flags: list[str] = field(default_factory=list)
    trace: list[GuessTrace] = field(default_factory=list)

    @property
    def total_queries(self) -> int:
        return self.elt_of_queries + self.set_of_queries

    def cover_size(self) -> Optional[int]:
        return None if self.cover is None else len(self.cover)


# -- offline subroutines ------------------------------------------------


def greedy_cover(elements: Iterable[int], sets: Mapping[int, Iterable[int]]) -> Cover:
    """Greedy cover of a materialized sub-instance; no oracle queries.

    Repeatedly picks the set covering the most uncovered elements, ties
    broken by lowest set id.  Raises InfeasibleError if some element
    appears in no provided set.
    """
    universe = sorted(set(elements))
    if not universe:
        return Cover([], provenance="greedy")
    index = {e: i for i, e in enumerate(universe)}
    sids = sorted(sets)
    members: list[list[int]] = []  # positions into universe, per set
    containing: list[list[int]] = [[] for _ in universe]  # set index per element
    for si, sid in enumerate(sids):
        row = [index[e] for e in set(sets[sid]) if e in index]
        members.append(row)
        for p in row:
            containing[p].append(si)
    for e, lst in zip(universe, containing):
        if not lst:
            raise InfeasibleError(f"element {e} lies in no provided set")

    gains = np.array([len(row) for row in members], dtype=np.int64)
    covered = np.zeros(len(universe), dtype=bool)
    chosen: list[int] = []
    remaining = len(universe)
    while remaining:
        si = int(np.argmax(gains))  # argmax takes the lowest index on ties
        if gains[si] <= 0:
            raise InfeasibleError("greedy stalled with uncovered elements")
        chosen.append(sids[si])
        for p in members[si]:
            if not covered[p]:
                covered[p] = True
                remaining -= 1
                for sj in containing[p]:
                    gains[sj] -= 1
    return Cover(chosen, provenance="greedy")


@dataclass(frozen=True)
class BruteForceResult:
    k: int
    cover: Cover


def brute_force_min_cover(sys: SetSystem, cap: int = 24) -> BruteForceResult:
    """Exact minimum cover by enumeration over subsets of increasing size.

    Only for small instances (m <= cap).  Returns the lexicographically
    first optimum among ties.
    """
    if sys.m > cap:
        raise TooLargeError(f"m={sys.m} exceeds brute-force cap {cap}")
    full = (1 << sys.n) - 1
    masks = []
    for row in sys.elt_of:
        mask = 0
        for e in row:
            mask |= 1 << (e - 1)
        masks.append(mask)
    union_all = 0
    for mask in masks:
        union_all |= mask
    if union_all != full:
        raise InfeasibleError("no cover exists: some element lies in no set")
    for r in range(0, sys.m + 1):
        for combo in combinations(range(sys.m), r):
            u = 0
            for i in combo:
                u |= masks[i]
            if u == full:
                return BruteForceResult(r, Cover([i + 1 for i in combo], provenance="brute-force"))
    raise InfeasibleError("unreachable: full union checked above")


# -- sampling primitives --------------------------------------------------


def set_sample(
    oracle: Oracle, ell: int, rng: np.random.Generator
) -> tuple[list[int], set[int]]:
    """Pick ell distinct sets uniformly and materialize their union.

    Costs sum(|S| + 1) EltOf queries over the picked sets.
    """
    m = oracle.system.m
    if not 1 <= ell <= m:
        raise PreconditionError(f"ell={ell} outside 1..{m}")
    picked = sorted(int(s) + 1 for s in rng.choice(m, size=ell, replace=False))
    covered: set[int] = set()
    for s in picked:
        covered.update(oracle.enumerate_set(s))
    return picked, covered


def element_sample(
    u_rem: Iterable[int], size: int, rng: np.random.Generator
) -> list[int]:
    """Uniform sample without replacement from a materialized element set.

    Free of oracle queries; returns min(size, |u_rem|) ids, sorted.
    """
    pool = sorted(set(u_rem))
    if size <= 0:
        return []
    if size >= len(pool):
        return pool
    idx = rng.choice(len(pool), size=size, replace=False)
    return sorted(pool[i] for i in idx)


def offline_sc(
    oracle: Oracle, x: Iterable[int], ell: int, config: SolverConfig = DEFAULT_CONFIG
) -> Optional[Cover]:
    """Solve the sub-instance induced by elements x, if cheap enough.

    Fetches every containing-set list by full SetOf enumeration, runs
    greedy on the projection, and returns the cover only when its size
    is within H(|x|) * ell; otherwise None.  Elements of degree zero
    make the sub-instance infeasible, which also yields None.
    """
    xs = sorted(set(x))
    if not xs:
        return Cover([], provenance="offline")
    projected: dict[int, list[int]] = {}
    feasible = True
    for e in xs:
        containing = oracle.enumerate_element(e)
        if not containing:
            feasible = False
        for sid in containing:
            projected.setdefault(sid, []).append(e)
    if not feasible:
        return None
    cover = greedy_cover(xs, projected)
    if len(cover) <= rho_greedy(len(xs)) * ell:
        return Cover(cover.set_ids, provenance="offline")
    return None


# -- guess grids ----------------------------------------------------------


def geometric_guesses(lo: int, hi: int, ratio: float) -> list[int]:
    """Distinct integer guesses covering [lo, hi] with steps <= ratio.

    Consecutive integers where the geometric step is below 1; hi is
    always included so a guess >= any target in [lo, hi] exists.
    """
    if lo < 1 or hi < lo:
        raise PreconditionError(f"bad guess range [{lo}, {hi}]")
    out = []
    ell = lo
    while ell <= hi:
        out.append(ell)
        ell = max(ell + 1, math.ceil(ell * ratio))
    if out[-1] != hi:
        out.append(hi)
    return out


# -- iterated set cover ----------------------------------------------------


def iter_set_cover(
    oracle: Oracle,
    alpha: float,
    eps: float,
    l: int,
    u: int,
    config: SolverConfig = DEFAULT_CONFIG,
    rng: Optional[np.random.Generator] = None,
) -> RunReport:
    """Guess-and-sample set cover for a known optimum range [l, u].

    For each guess ell on a (1 + eps/(2*alpha*rho)) grid, ascending:
    sample ell sets and strip their union from the universe; then up to
    ceil(alpha) - 2 rounds of element sampling + offline covering; if
    the remainder is small enough, one final offline run decides the
    guess.  The first accepted guess is returned and the cover is
    complete by construction.
    """
    sys = oracle.system
    n, m = sys.n, sys.m
    if alpha < 2:
        raise PreconditionError("iter_set_cover requires alpha >= 2")
    if not 1 <= l <= u <= n:
        raise PreconditionError(f"guess range [{l}, {u}] outside [1, {n}]")
    if rng is None:
        rng = stream(config.seed, "solve/iter")
    rho = rho_greedy(n)
    ratio = 1.0 + eps / (2.0 * alpha * rho)
    inner_rounds = math.ceil(alpha) - 2
    exponent = 1.0 / (alpha - 1.0)
    report = RunReport(cover=None, elt_of_queries=0, set_of_queries=0, status="infeasible")

    try:
        for ell in geometric_guesses(l, u, ratio):
            report.guesses_tried.append(ell)
            sol_ids: list[int] = []
            sol_seen: set[int] = set()

            def absorb(ids: Sequence[int]) -> None:
                for sid in ids:
                    if sid not in sol_seen:
                        sol_seen.add(sid)
                        sol_ids.append(sid)

            picked, covered = set_sample(oracle, min(ell, m), rng)
            absorb(picked)
            u_rem = set(range(1, n + 1)) - covered

            rounds_done = 0
            aborted = False
            for _ in range(inner_rounds):
                size = math.ceil(
                    config.c_elt * rho * ell * math.log(max(m, 2)) * (n / ell) ** exponent
                )
                x = element_sample(u_rem, size, rng)
                d = offline_sc(oracle, x, ell, config)
                rounds_done += 1
                if d is None:
                    aborted = True
                    break
                absorb(d.set_ids)
                for sid in d.set_ids:
                    u_rem.difference_update(oracle.enumerate_set(sid))
            if aborted:
                report.trace.append(GuessTrace(ell, rounds_done))
                continue

            threshold = config.feasibility_multiplier * ell * (n / ell) ** exponent
            if len(u_rem) <= threshold:
                d = offline_sc(oracle, sorted(u_rem), ell, config)
                if d is not None:
                    absorb(d.set_ids)
                    report.trace.append(GuessTrace(ell, rounds_done, True, True))
                    report.cover = Cover(sol_ids, provenance="small-sc")
                    report.status = "ok"
                    break
                report.trace.append(GuessTrace(ell, rounds_done, True))
            else:
                report.trace.append(GuessTrace(ell, rounds_done))
    except BudgetExhausted:
        report.status = "budget-exhausted"
        report.cover = None
    report.elt_of_queries = oracle.elt_of_queries
    report.set_of_queries = oracle.set_of_queries
    return report


def small_set_cover(
    oracle: Oracle,
    alpha: float,
    eps: float,
    config: SolverConfig = DEFAULT_CONFIG,
    rng: Optional[np.random.Generator] = None,
) -> RunReport:
    """Two-stage solver: coarse size estimate, then a narrow guess window.

    Stage 1 runs iter_set_cover with a log-scale approximation target
    over the full range to locate the optimum within a rho*log(n)
    factor; stage 2 reruns it at the requested alpha on that window.
    """
    sys = oracle.system
    n = sys.n
    if rng is None:
        rng = stream(config.seed, "solve/small")
    alpha1 = max(2, math.ceil(math.log(max(n, 2))))
    stage1 = iter_set_cover(oracle, float(alpha1), 1.0, 1, n, config, rng)
    if stage1.status != "ok":
        return stage1
    k_est = len(stage1.cover)
    rho = rho_greedy(n)
    lo = max(1, math.floor(k_est / (rho * math.log(max(n, 2)))))
    hi = min(n, math.ceil(k_est * (1.0 + eps / (2.0 * alpha * rho))))
    hi = max(hi, lo)
    report = iter_set_cover(oracle, alpha, eps, lo, hi, config, rng)
    report.flags.append(f"stage1-estimate={k_est}")
    if report.cover is not None:
        report.cover.provenance = "small-sc"
    return report


# -- large set cover --------------------------------------------------------


def _materialized_greedy(oracle: Oracle) -> Cover:
    """Fallback: enumerate the whole instance and run greedy on it."""
    sys = oracle.system
    sets = {s: oracle.enumerate_set(s) for s in range(1, sys.m + 1)}
    cover = greedy_cover(range(1, sys.n + 1), sets)
    return Cover(cover.set_ids, provenance="large-sc")


def large_set_cover(
    oracle: Oracle,
    eps: float,
    config: SolverConfig = DEFAULT_CONFIG,
    rng: Optional[np.random.Generator] = None,
) -> RunReport:
    """Set cover without maintaining uncovered elements.

    Guesses descend geometrically from n.  Per guess: pick ceil(eps*ell/3)
    random sets (never enumerated); one SetOf probe per element decides
    whether it is rare (degree below c_set*m*ln(n)/(eps*ell)); rare
    elements are materialized fully and covered offline.  The first
    failing guess returns the previous solution.
    """
    sys = oracle.system
    n, m = sys.n, sys.m
    if rng is None:
        rng = stream(config.seed, "solve/large")
    rho = rho_greedy(n)
    ratio = 1.0 + eps / (3.0 * rho)
    report = RunReport(cover=None, elt_of_queries=0, set_of_queries=0, status="infeasible")
    sol: Optional[Cover] = None

    try:
        for ell in reversed(geometric_guesses(1, n, ratio)):
            report.guesses_tried.append(ell)
            rnd_count = min(math.ceil(eps * ell / 3.0), m)
            picked = sorted(int(s) + 1 for s in rng.choice(m, size=rnd_count, replace=False))
            pos = math.ceil(config.c_set * m * math.log(max(n, 2)) / (eps * ell))

            rare: list[int] = []
            containing: dict[int, list[int]] = {}
            for e in range(1, n + 1):
                if oracle.set_of(e, pos) is None:  # size test: one query
                    containing[e] = oracle.enumerate_element(e)
                    rare.append(e)
            projected: dict[int, list[int]] = {}
            for e in rare:
                for sid in containing[e]:
                    projected.setdefault(sid, []).append(e)
            try:
                d = greedy_cover(rare, projected)
            except InfeasibleError:
                d = None
            rho_x = rho_greedy(len(rare)) if rare else 1.0
            if d is not None and len(d) <= rho_x * ell:
                ids = list(picked)
                seen = set(ids)
                for sid in d.set_ids:
                    if sid not in seen:
                        seen.add(sid)
                        ids.append(sid)
                sol = Cover(ids, provenance="large-sc")
                report.trace.append(GuessTrace(ell, accepted=True))
            else:
                report.trace.append(GuessTrace(ell))
                if sol is None:
                    # Unreachable when the first guess is >= n (the offline
                    # cover can never exceed rho * n), kept for safety.
                    sol = _materialized_greedy(oracle)
                    report.flags.append("first-guess-fallback")
                break
        if sol is not None and _covers(sys, sol):
            report.cover = sol
            report.status = "ok"
        elif sol is not None:
            # The sampled sets missed a non-rare element (possible but
            # vanishingly rare); fall back to the materialized instance.
            sol = _materialized_greedy(oracle)
            report.flags.append("resample-fallback")
            report.cover = sol
            report.status = "ok"
    except BudgetExhausted:
        report.status = "budget-exhausted"
        report.cover = None
    report.elt_of_queries = oracle.elt_of_queries
    report.set_of_queries = oracle.set_of_queries
    return report


def _covers(sys: SetSystem, cover: Cover) -> bool:
    """Out-of-band coverage check, free of oracle accounting."""
    seen = bytearray(sys.n + 1)
    for s in cover.set_ids:
        for e in sys.elt_of[s - 1]:
            seen[e] = 1
    return all(seen[1:])


def sublinear_set_cover(
    oracle: Oracle,
    alpha: float,
    eps: float,
    config: SolverConfig = DEFAULT_CONFIG,
    rng: Optional[np.random.Generator] = None,
) -> RunReport:
    """Combined solver: route by a coarse estimate of the optimum size.

    Runs the stage-1 estimate of small_set_cover; if the estimate is at
    least sqrt(m) the large-k algorithm takes over, otherwise stage 2 of
    the small-k algorithm completes.  Queries accumulate on one oracle.
    """
    sys = oracle.system
    n, m = sys.n, sys.m
    if rng is None:
        rng = stream(config.seed, "solve/auto")
    alpha1 = max(2, math.ceil(math.log(max(n, 2))))
    stage1 = iter_set_cover(oracle, float(alpha1), 1.0, 1, n, config, rng)
    if stage1.status != "ok":
        return stage1
    k_est = len(stage1.cover)
    if k_est >= math.sqrt(m):
        report = large_set_cover(oracle, eps, config, rng)
        report.route = "large"
    else:
        rho = rho_greedy(n)
        lo = max(1, math.floor(k_est / (rho * math.log(max(n, 2)))))
        hi = min(n, math.ceil(k_est * (1.0 + eps / (2.0 * alpha * rho))))
        hi = max(hi, lo)
        report = iter_set_cover(oracle, alpha, eps, lo, hi, config, rng)
        report.route = "small"
        if report.cover is not None:
            report.cover.provenance = "small-sc"
    report.flags.append(f"stage1-estimate={k_est}")
    return report
