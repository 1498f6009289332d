"""Median instances: dense random set systems with verified structure.

A median instance is drawn by including each (set, element) incidence
independently with probability 1 - p0 and accepting the draw only if six
structural properties hold.  Together they guarantee both a floor on the
minimum cover size and enough slack (large pairwise intersections, many
swap partners) for the modified-instance construction to go through.

Two parameterizations are supported:

* simplified — p0 = sqrt(9 ln(m) / n); the cover floor is 3.
* general    — p0 = (8 (alpha*k + 2) ln(m) / n)^(1 / (alpha*k)); the
  cover floor is alpha*k, for k chosen sets.

Logs are natural throughout.  Property checks run exactly (vectorized
over all tuples) when the tuple count fits a budget, otherwise over a
uniform sample of tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import InfeasibleError, PreconditionError, SetCoverError, SetSystem
from ..rng import stream
from ..solvers import greedy_cover

DEFAULT_EXACT_BUDGET = 10_000_000
DEFAULT_SAMPLE_TRIALS = 10_000


class ExhaustedAttempts(SetCoverError):
    """Rejection sampling failed to produce an accepted instance."""

    def __init__(self, attempts: int, last_report: Optional["MedianReport"]):
        failed = last_report.failed_ids() if last_report else []
        super().__init__(
            f"no accepted instance in {attempts} attempts"
            + (f" (last draw failed {','.join(failed)})" if failed else "")
        )
        self.attempts = attempts
        self.last_report = last_report


@dataclass(frozen=True)
class MedianParams:
    """Parameters of the random-instance distribution.

    With p0 left as None it is computed from the variant's formula and
    the formula's validity regime is enforced (simplified: p0 <= 1/2;
    general: 2 <= k <= (n / (16 alpha ln m))^(1/(4 alpha + 1))).  An
    explicit p0 bypasses the regime checks (useful for small-scale
    experiments where the formula degenerates).
    """

    m: int
    n: int
    variant: str = "simplified"
    k: Optional[int] = None
    alpha: Optional[float] = None
    p0: Optional[float] = None

    def __post_init__(self):
        if self.m < 2 or self.n < 1:
            raise PreconditionError("need m >= 2 and n >= 1")
        if self.variant not in ("simplified", "general"):
            raise PreconditionError("variant must be 'simplified' or 'general'")
        explicit = self.p0 is not None
        if self.variant == "general":
            if self.k is None or self.alpha is None:
                raise PreconditionError("general variant needs k and alpha")
            if self.k < 2:
                raise PreconditionError("general variant needs k >= 2")
            if not self.alpha > 1:
                raise PreconditionError("general variant needs alpha > 1")
            if not explicit:
                k_max = (self.n / (16 * self.alpha * math.log(self.m))) ** (
                    1.0 / (4 * self.alpha + 1)
                )
                if self.k > k_max:
                    raise PreconditionError(
                        f"k={self.k} above the valid range bound {k_max:.3f} "
                        f"for m={self.m}, n={self.n}, alpha={self.alpha}"
                    )
        if not explicit:
            object.__setattr__(self, "p0", self.default_p0())
            if self.variant == "simplified" and self.p0 > 0.5:
                raise PreconditionError(
                    f"default p0={self.p0:.3f} > 1/2; n is too small for m "
                    "(pass an explicit p0 to override)"
                )
        if not 0.0 < self.p0 < 1.0:
            raise PreconditionError(f"p0={self.p0} outside (0, 1)")

    def default_p0(self) -> float:
        if self.variant == "simplified":
            return math.sqrt(9.0 * math.log(self.m) / self.n)
        exponent = 1.0 / (self.alpha * self.k)
        return (8.0 * (self.alpha * self.k + 2.0) * math.log(self.m) / self.n) ** exponent


@dataclass(frozen=True)
class PropertyCheck:
    """Verdict for one structural property."""

    prop_id: str  # "a".."f"
    holds: bool
    measured: float  # extremal value found (min for lower bounds, max for upper)
    threshold: float
    margin: float  # measured - threshold, in the property's native units
    mode: str  # "exact" | "sampled"
    trials: Optional[int] = None  # tuples examined when sampled

    def __str__(self) -> str:
        state = "ok " if self.holds else "FAIL"
        extra = f" trials={self.trials}" if self.mode == "sampled" else ""
        return (
            f"({self.prop_id}) {state} measured={self.measured:g} "
            f"threshold={self.threshold:g} [{self.mode}{extra}]"
        )


@dataclass
class MedianReport:
    """Per-property verdicts for one instance."""

    checks: list[PropertyCheck]

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks)

    def failed_ids(self) -> list[str]:
        return [c.prop_id for c in self.checks if not c.holds]

    def by_id(self, prop_id: str) -> PropertyCheck:
        for c in self.checks:
            if c.prop_id == prop_id:
                return c
        raise KeyError(prop_id)


@dataclass
class MedianDraw:
    system: SetSystem
    report: MedianReport
    attempts: int


def gen_random_instance(m: int, n: int, p0: float, rng: np.random.Generator) -> SetSystem:
    """One draw: each incidence present independently with probability 1 - p0."""
    if not 0.0 < p0 < 1.0:
        raise PreconditionError(f"p0={p0} outside (0, 1)")
    incidence = rng.random((m, n)) >= p0
    return SetSystem.from_incidence(incidence)


# -- thresholds -----------------------------------------------------------


def _thresholds(params: MedianParams) -> dict[str, float]:
    m, n, p0 = params.m, params.n, params.p0
    if params.variant == "simplified":
        return {
            "a": 1.0,
            "b": 18.0 * math.log(m),
            "c": n / 8.0,
            "d": m * math.sqrt(9.0 * math.log(m)) / (4.0 * math.sqrt(n)),
            "e": 6.0 * math.sqrt(n * math.log(m)),
            "f": 6.0 * m * math.sqrt(math.log(m) / n),
        }
    k = params.k
    return {
        "a": 1.0,
        "b": 2.0 * n * p0**k,
        "c": (1.0 - p0) * p0 * m / 2.0,
        "d": (1.0 - p0) * (1.0 - p0 ** (k - 1)) * n / 2.0,
        "e": 2.0 * p0 * (1.0 - p0) * (1.0 - p0 ** (k - 1)) * n,
        "f": (1.0 + 1.0 / k) * p0 * m,
    }


def _cover_tuple_size(params: MedianParams) -> int:
    """Tuple size for property (a): 2 simplified, floor(alpha*k) general."""
    if params.variant == "simplified":
        return 2
    return int(math.floor(params.alpha * params.k))


def _union_tuple_size(params: MedianParams) -> int:
    """Tuple size for properties (b)/(d): 2 simplified, k general."""
    return 2 if params.variant == "simplified" else params.k


# -- exact property evaluation (vectorized) -------------------------------

_PAIR_CHUNK = 8192


def _pair_stats(a32: np.ndarray, n: int):
    """Intersection and uncovered counts over all unordered set pairs."""
    inter = a32 @ a32.T
    sizes = a32.sum(axis=1)
    uncov = n - sizes[:, None] - sizes[None, :] + inter
    iu = np.triu_indices(a32.shape[0], k=1)
    return inter[iu], uncov[iu]


def _exact_triple_max(a32: np.ndarray) -> float:
    """max over pairs (i<j) and sets S of |(S_i n S_j) \\ S|, chunked."""
    m = a32.shape[0]
    ii, jj = np.triu_indices(m, k=1)
    worst = 0.0
    for lo in range(0, len(ii), _PAIR_CHUNK):
        hi = min(lo + _PAIR_CHUNK, len(ii))
        inter = a32[ii[lo:hi]] * a32[jj[lo:hi]]  # pair intersections, 0/1
        inter_sizes = inter.sum(axis=1)
        overlap = inter @ a32.T  # |inter n S| for every S
        worst = max(worst, float((inter_sizes - overlap.min(axis=1)).max()))
    return worst


def _exact_element_pair_min(a32: np.ndarray) -> float:
    """min over ordered element pairs (e != e') of #{S : e in S, e' not in S}."""
    coldeg = a32.sum(axis=0)
    common = a32.T @ a32
    counts = coldeg[:, None] - common
    np.fill_diagonal(counts, np.inf)
    return float(counts.min())


# -- sampled property evaluation ------------------------------------------


def _packed_rows(sys: SetSystem) -> np.ndarray:
    return np.packbits(sys.incidence(), axis=1)


def _sample_union_stats(
    packed: np.ndarray, n: int, size: int, trials: int, rng: np.random.Generator,
    designated_last: bool,
):
    """Sampled (uncovered, |last n union-of-rest|) over random set tuples."""
    m = packed.shape[0]
    uncov_max = 0.0
    uncov_min = math.inf
    inter_min = math.inf
    for _ in range(trials):
        tup = rng.choice(m, size=size, replace=False)
        union_rest = packed[tup[0]]
        for i in tup[1:-1]:
            union_rest = union_rest | packed[i]
        last = packed[tup[-1]]
        union_all = union_rest | last
        uncov = n - int(np.bitwise_count(union_all).sum())
        uncov_max = max(uncov_max, uncov)
        uncov_min = min(uncov_min, uncov)
        if designated_last:
            if size >= 2:
                inter = int(np.bitwise_count(union_rest & last).sum())
            else:
                inter = int(np.bitwise_count(last).sum())
            inter_min = min(inter_min, inter)
    return uncov_min, uncov_max, inter_min


def _sample_triple_max(
    packed: np.ndarray, size: int, trials: int, rng: np.random.Generator
) -> float:
    """Sampled max of |(last n union-of-first) \\ extra| over (size+1)-tuples."""
    m = packed.shape[0]
    worst = 0.0
    for _ in range(trials):
        tup = rng.choice(m, size=size + 1, replace=False)
        union_rest = packed[tup[0]]
        for i in tup[1 : size - 1]:
            union_rest = union_rest | packed[i]
        last = packed[tup[size - 1]]
        extra = packed[tup[size]]
        val = int(np.bitwise_count((union_rest & last) & ~extra).sum())
        worst = max(worst, val)
    return worst


def _sample_element_pair_min(
    sys: SetSystem, trials: int, rng: np.random.Generator
) -> float:
    packed_cols = np.packbits(sys.incidence().T.copy(), axis=1)
    n = sys.n
    best = math.inf
    for _ in range(trials):
        e, ep = rng.choice(n, size=2, replace=False)
        val = int(np.bitwise_count(packed_cols[e] & ~packed_cols[ep]).sum())
        best = min(best, val)
    return best


# -- the checker ------------------------------------------------------------


def check_median(
    sys: SetSystem,
    params: MedianParams,
    mode: str = "auto",
    rng: Optional[np.random.Generator] = None,
    trials: int = DEFAULT_SAMPLE_TRIALS,
    exact_budget: int = DEFAULT_EXACT_BUDGET,
) -> MedianReport:
    """Measure the six structural properties and report margins.

    mode "exact" evaluates every tuple; "sampled" draws `trials` uniform
    tuples per property; "auto" picks exact per property when its tuple
    count fits exact_budget.  The general variant's cover property is
    always sampled once the tuple size exceeds 3 (full verification is
    out of reach); a greedy witness search still catches definite
    failures.  Reports never raise on a failing property.
    """
    if sys.m != params.m or sys.n != params.n:
        raise PreconditionError("system dimensions disagree with params")
    if mode not in ("auto", "exact", "sampled"):
        raise PreconditionError("mode must be auto|exact|sampled")
    if rng is None:
        rng = stream(0, "median/check")
    thr = _thresholds(params)
    m, n = params.m, params.n
    j_cover = _cover_tuple_size(params)
    k_union = _union_tuple_size(params)

    pair_count = m * (m - 1) // 2
    elem_pair_count = n * (n - 1)
    triple_count = pair_count * max(m - 2, 1)

    def pick_mode(tuple_count: int, exact_supported: bool, force_sampled: bool = False):
        # Exact evaluation exists for pair/triple shapes; anything wider is
        # sampled even when exact mode was requested.
        if force_sampled or not exact_supported:
            return "sampled"
        if mode == "exact":
            return "exact"
        if mode == "sampled":
            return "sampled"
        return "exact" if tuple_count <= exact_budget else "sampled"

    a32 = None
    inter_pairs = uncov_pairs = None
    if mode != "sampled" and (j_cover == 2 or k_union == 2):
        a32 = sys.incidence().astype(np.float32)
        inter_pairs, uncov_pairs = _pair_stats(a32, n)
    packed = None

    def get_packed():
        nonlocal packed
        if packed is None:
            packed = _packed_rows(sys)
        return packed

    checks: list[PropertyCheck] = []

    # (a) no j_cover sets cover everything: min uncovered over tuples >= 1.
    force_a_sampled = params.variant == "general" and params.alpha * params.k > 3
    mode_a = pick_mode(math.comb(m, j_cover), j_cover == 2, force_a_sampled)
    if mode_a == "exact":
        measured_a = float(uncov_pairs.min())
        trials_a = None
    else:
        # A greedy witness no larger than j_cover certifies failure outright.
        full_sets = {s + 1: sys.elt_of[s] for s in range(m)}
        try:
            g = len(greedy_cover(range(1, n + 1), full_sets))
        except InfeasibleError:
            g = m + 1
        if g <= j_cover:
            measured_a = 0.0
        else:
            lo, _, _ = _sample_union_stats(get_packed(), n, j_cover, trials, rng, False)
            measured_a = float(lo)
        trials_a = trials
    checks.append(
        PropertyCheck("a", measured_a >= thr["a"], measured_a, thr["a"],
                      measured_a - thr["a"], mode_a, trials_a)
    )

    # (b) union of k_union sets leaves few elements uncovered.
    mode_b = pick_mode(math.comb(m, k_union), k_union == 2)
    if mode_b == "exact":
        measured_b = float(uncov_pairs.max())
        trials_b = None
    else:
        _, measured_b, _ = _sample_union_stats(get_packed(), n, k_union, trials, rng, False)
        trials_b = trials
    checks.append(
        PropertyCheck("b", measured_b <= thr["b"], measured_b, thr["b"],
                      measured_b - thr["b"], mode_b, trials_b)
    )

    # (c) simplified: pairwise set intersections are large.
    #     general: every ordered element pair has many separating sets.
    if params.variant == "simplified":
        mode_c = pick_mode(pair_count, True)
        if mode_c == "exact":
            if a32 is None:
                a32 = sys.incidence().astype(np.float32)
                inter_pairs, uncov_pairs = _pair_stats(a32, n)
            measured_c = float(inter_pairs.min())
            trials_c = None
        else:
            _, _, measured_c = _sample_union_stats(get_packed(), n, 2, trials, rng, True)
            trials_c = trials
    else:
        mode_c = pick_mode(elem_pair_count, True)
        if mode_c == "exact":
            if a32 is None:
                a32 = sys.incidence().astype(np.float32)
            measured_c = _exact_element_pair_min(a32)
            trials_c = None
        else:
            measured_c = _sample_element_pair_min(sys, trials, rng)
            trials_c = trials
    checks.append(
        PropertyCheck("c", measured_c >= thr["c"], float(measured_c), thr["c"],
                      float(measured_c) - thr["c"], mode_c, trials_c)
    )

    # (d) simplified: every ordered element pair has many separating sets.
    #     general: the designated set meets the union of the other k-1.
    if params.variant == "simplified":
        mode_d = pick_mode(elem_pair_count, True)
        if mode_d == "exact":
            measured_d = _exact_element_pair_min(a32)
            trials_d = None
        else:
            measured_d = _sample_element_pair_min(sys, trials, rng)
            trials_d = trials
    else:
        mode_d = pick_mode(math.comb(m, k_union) * k_union, k_union == 2)
        if mode_d == "exact":
            measured_d = float(inter_pairs.min())
            trials_d = None
        else:
            _, _, measured_d = _sample_union_stats(
                get_packed(), n, k_union, trials, rng, True
            )
            trials_d = trials
    checks.append(
        PropertyCheck("d", measured_d >= thr["d"], float(measured_d), thr["d"],
                      float(measured_d) - thr["d"], mode_d, trials_d)
    )

    # (e) what the designated intersection loses to any further set is small.
    mode_e = pick_mode(triple_count, k_union == 2)
    if mode_e == "exact":
        if a32 is None:
            a32 = sys.incidence().astype(np.float32)
        measured_e = _exact_triple_max(a32)
        trials_e = None
    else:
        measured_e = _sample_triple_max(get_packed(), k_union, trials, rng)
        trials_e = trials
    checks.append(
        PropertyCheck("e", measured_e <= thr["e"], float(measured_e), thr["e"],
                      float(measured_e) - thr["e"], mode_e, trials_e)
    )

    # (f) no element is missing from too many sets (always exact, O(n)).
    deg = np.array([len(row) for row in sys.set_of], dtype=np.int64)
    measured_f = float((m - deg).max()) if n else 0.0
    checks.append(
        PropertyCheck("f", measured_f <= thr["f"], measured_f, thr["f"],
                      measured_f - thr["f"], "exact", None)
    )

    return MedianReport(checks)


def gen_median_instance(
    params: MedianParams,
    rng: np.random.Generator,
    max_attempts: int = 50,
    mode: str = "auto",
    trials: int = DEFAULT_SAMPLE_TRIALS,
    exact_budget: int = DEFAULT_EXACT_BUDGET,
) -> MedianDraw:
    """Rejection-sample random instances until the property check passes."""
    last_report: Optional[MedianReport] = None
    for attempt in range(1, max_attempts + 1):
        sys = gen_random_instance(params.m, params.n, params.p0, rng)
        report = check_median(sys, params, mode, rng, trials, exact_budget)
        if report.passed:
            return MedianDraw(sys, report, attempt)
        last_report = report
    raise ExhaustedAttempts(max_attempts, last_report)
