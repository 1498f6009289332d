"""Offline solvers and the three oracle-access algorithms."""

import math
import statistics
from itertools import combinations

import pytest

from subcover.core import (
    BudgetExhausted,
    InfeasibleError,
    Oracle,
    PreconditionError,
    SetSystem,
    TooLargeError,
    verify_cover_naive,
)
from subcover.harness import gen_planted_instance
from subcover.rng import stream
from subcover.solvers import (
    SolverConfig,
    brute_force_min_cover,
    greedy_cover,
    harmonic,
    iter_set_cover,
    large_set_cover,
    offline_sc,
    rho_greedy,
    small_set_cover,
    sublinear_set_cover,
)

CFG = SolverConfig(alpha=2.0, eps=0.5)


def random_feasible_system(rng, m_max=10, n_max=12):
    m = int(rng.integers(3, m_max + 1))
    n = int(rng.integers(3, n_max + 1))
    inc = rng.random((m, n)) < float(rng.uniform(0.25, 0.75))
    for e in range(n):
        if not inc[:, e].any():
            inc[int(rng.integers(m)), e] = True
    return SetSystem.from_incidence(inc)


def brute_by_enumeration(sets: dict, universe: set):
    """Independent oracle: scan all subsets of the set ids."""
    ids = sorted(sets)
    best = None
    for r in range(len(ids) + 1):
        for combo in combinations(ids, r):
            u = set()
            for i in combo:
                u |= set(sets[i])
            if universe <= u:
                return r, list(combo)
    return best


def test_harmonic_values():
    assert harmonic(0) == 0.0
    assert harmonic(1) == 1.0
    assert abs(harmonic(3) - (1 + 0.5 + 1 / 3)) < 1e-12
    assert rho_greedy(0) == 1.0


def test_greedy_single_forced_set():
    cover = greedy_cover({1}, {5: {1}})
    assert cover.set_ids == [5]


def test_greedy_tie_break_and_optimal_pair():
    sets = {1: {1, 2}, 2: {2, 3}, 3: {1, 3}}
    cover = greedy_cover({1, 2, 3}, sets)
    assert cover.set_ids == [1, 2]  # ties to lowest id: picks 1, then 2
    opt, _ = brute_by_enumeration(sets, {1, 2, 3})
    assert opt == 2 and len(cover) == 2


def test_greedy_infeasible_element():
    with pytest.raises(InfeasibleError):
        greedy_cover({1, 2}, {1: {1}})


def test_greedy_within_harmonic_ratio_50_seeds():
    rng = stream(11, "test/greedy-ratio")
    for _ in range(50):
        sys_ = random_feasible_system(rng)
        sets = {s + 1: sys_.elt_of[s] for s in range(sys_.m)}
        cover = greedy_cover(range(1, sys_.n + 1), sets)
        opt = brute_force_min_cover(sys_).k
        assert len(cover) <= harmonic(sys_.n) * opt + 1e-9


def test_brute_force_trivial_and_partition():
    # one set equal to the universe plus junk
    sys_ = SetSystem.from_sets(3, 4, {1: [1, 2, 3, 4], 2: [1], 3: [2, 3]})
    res = brute_force_min_cover(sys_)
    assert res.k == 1 and res.cover.set_ids == [1]
    # disjoint partition plus strict-subset noise
    sys2 = SetSystem.from_sets(
        5, 6, {1: [1, 2], 2: [3, 4], 3: [5, 6], 4: [1], 5: [3]}
    )
    assert brute_force_min_cover(sys2).k == 3


def test_brute_force_caps_and_infeasible():
    big = SetSystem.from_sets(25, 2, {s: [1, 2] for s in range(1, 26)})
    with pytest.raises(TooLargeError):
        brute_force_min_cover(big)
    bad = SetSystem.from_sets(2, 2, {1: [1], 2: [1]})
    with pytest.raises(InfeasibleError):
        brute_force_min_cover(bad)


def test_dense_random_instance_needs_three_sets():
    """Pair scan proves min cover >= 3 on a dense random draw."""
    from subcover.lowerbound import gen_random_instance

    sys_ = gen_random_instance(30, 30, 0.45, stream(3, "test/dense30"))
    masks = []
    for row in sys_.elt_of:
        m = 0
        for e in row:
            m |= 1 << e
        masks.append(m)
    full = 0
    for e in range(1, 31):
        full |= 1 << e
    assert all(mask != full for mask in masks)
    assert all(
        masks[i] | masks[j] != full for i in range(30) for j in range(i + 1, 30)
    )
    # exhaustive pair check is exactly the k >= 3 certificate


def test_offline_sc_empty_and_singleton():
    sys_ = SetSystem.from_sets(3, 3, {1: [1, 2], 2: [2, 3], 3: [3]})
    o = Oracle(sys_)
    empty = offline_sc(o, [], 1)
    assert empty is not None and empty.set_ids == []
    assert o.total_queries() == 0
    d = offline_sc(o, [3], 1)
    assert d is not None and len(d) == 1
    assert o.set_of_queries == sys_.degree(3) + 1


def test_offline_sc_null_cases():
    sys_ = SetSystem.from_sets(2, 3, {1: [1], 2: [2]})
    o = Oracle(sys_)
    assert offline_sc(o, [3], 1) is None  # degree-0 element
    # cover exists but exceeds rho * ell with ell too small
    sys2 = SetSystem.from_sets(4, 4, {1: [1], 2: [2], 3: [3], 4: [4]})
    o2 = Oracle(sys2)
    assert offline_sc(o2, [1, 2, 3, 4], 1) is None  # needs 4 > H(4)*1


def test_offline_sc_on_planted_sample_vs_brute():
    rng = stream(21, "test/offline-planted")
    sys_ = gen_planted_instance(18, 18, 3, rng)
    opt = brute_force_min_cover(sys_).k
    o = Oracle(sys_)
    from subcover.solvers import element_sample

    x = element_sample(range(1, 19), 9, rng)
    d = offline_sc(o, x, opt)
    assert d is not None
    assert len(d) <= rho_greedy(len(x)) * opt


def test_iter_set_cover_single_set_instance():
    sys_ = SetSystem.from_sets(1, 6, {1: [1, 2, 3, 4, 5, 6]})
    rep = iter_set_cover(Oracle(sys_), 2.0, 0.5, 1, 1, CFG, stream(1, "t"))
    assert rep.status == "ok"
    assert rep.cover_size() <= 1 + rho_greedy(6)
    assert verify_cover_naive(Oracle(sys_), rep.cover).covered


def test_iter_set_cover_planted_512():
    sys_ = gen_planted_instance(512, 512, 8, stream(5, "gen/planted"))
    o = Oracle(sys_)
    rep = iter_set_cover(o, 2.0, 0.5, 1, 512, CFG, stream(5, "solve/iter"))
    assert rep.status == "ok"
    assert verify_cover_naive(Oracle(sys_), rep.cover).covered
    assert rep.cover_size() <= (2 * rho_greedy(512) + 0.5) * 8


def test_iter_alpha_two_runs_zero_inner_rounds():
    sys_ = gen_planted_instance(64, 64, 4, stream(6, "gen/planted"))
    rep = iter_set_cover(Oracle(sys_), 2.0, 0.5, 1, 64, CFG, stream(6, "t"))
    assert rep.trace, "expected at least one guess"
    assert all(t.inner_rounds == 0 for t in rep.trace)
    assert all(t.feasibility_tested for t in rep.trace)


def test_iter_alpha_below_two_rejected():
    sys_ = gen_planted_instance(8, 8, 2, stream(7, "gen/planted"))
    with pytest.raises(PreconditionError):
        iter_set_cover(Oracle(sys_), 1.5, 0.5, 1, 8, CFG, stream(7, "t"))


def test_small_set_cover_single_universe_set():
    sys_ = SetSystem.from_sets(2, 5, {1: [1, 2, 3, 4, 5], 2: [2]})
    rep = small_set_cover(Oracle(sys_), 2.0, 0.5, CFG, stream(8, "t"))
    assert rep.status == "ok"
    assert rep.cover_size() <= 2
    assert verify_cover_naive(Oracle(sys_), rep.cover).covered


def test_small_set_cover_planted_query_budget():
    for seed in (1, 2, 3):
        sys_ = gen_planted_instance(256, 256, 4, stream(seed, "gen/planted"))
        o = Oracle(sys_)
        rep = small_set_cover(o, 2.0, 0.5, CFG, stream(seed, "solve/small"))
        assert rep.status == "ok"
        assert verify_cover_naive(Oracle(sys_), rep.cover).covered
        assert rep.total_queries < 256 * 256 / 2


def test_small_stage1_estimate_brackets_opt():
    for seed in (1, 2, 3, 4, 5):
        sys_ = gen_planted_instance(
            18, 20, int(stream(seed, "k").integers(2, 5)), stream(seed, "gen/planted")
        )
        opt = brute_force_min_cover(sys_).k
        o = Oracle(sys_)
        n = sys_.n
        alpha1 = max(2, math.ceil(math.log(n)))
        st1 = iter_set_cover(o, float(alpha1), 1.0, 1, n, CFG, stream(seed, "s"))
        k_est = len(st1.cover)
        assert opt <= k_est <= rho_greedy(n) * math.log(n) * opt + 1


def test_small_set_cover_budget_exhaustion():
    sys_ = gen_planted_instance(64, 64, 4, stream(9, "gen/planted"))
    o = Oracle(sys_, budget=50)
    rep = small_set_cover(o, 2.0, 0.5, CFG, stream(9, "t"))
    assert rep.status == "budget-exhausted"
    assert rep.cover is None
    assert o.total_queries() <= 50


def test_large_set_cover_high_degree_instance():
    # every element in all-but-one set: degrees m-1, nothing is rare at
    # large guesses, and the run accepts with an empty offline cover
    sets = {s: [e for e in range(1, 9) if e != s] for s in range(1, 9)}
    sys_ = SetSystem.from_sets(8, 8, sets)
    rep = large_set_cover(Oracle(sys_), 1.0, SolverConfig(eps=1.0), stream(10, "t"))
    assert rep.status == "ok"
    assert not rep.flags
    assert verify_cover_naive(Oracle(sys_), rep.cover).covered


def test_large_set_cover_ratio_on_shrunk_twin():
    sys_ = gen_planted_instance(20, 20, 5, stream(11, "gen/planted"))
    k_exact = brute_force_min_cover(sys_).k
    assert k_exact == 5
    rep = large_set_cover(Oracle(sys_), 0.5, CFG, stream(11, "t"))
    assert rep.status == "ok"
    assert verify_cover_naive(Oracle(sys_), rep.cover).covered
    assert rep.cover_size() <= (rho_greedy(20) + 0.5) * k_exact


def test_large_set_cover_queries_shrink_with_k():
    cfg = SolverConfig(eps=0.5)
    totals = []
    for k in (8, 32):
        sys_ = gen_planted_instance(256, 256, k, stream(12, "gen/planted"))
        o = Oracle(sys_)
        large_set_cover(o, 0.5, cfg, stream(12, "t"))
        totals.append(o.total_queries())
    assert totals[1] < totals[0]


def test_materialized_greedy_fallback_covers():
    from subcover.solvers import _materialized_greedy

    sys_ = gen_planted_instance(16, 16, 4, stream(13, "gen/planted"))
    o = Oracle(sys_)
    cover = _materialized_greedy(o)
    assert verify_cover_naive(Oracle(sys_), cover).covered
    assert o.elt_of_queries == sys_.total_incidence() + sys_.m


def test_sublinear_routes_small_for_tiny_optimum():
    sys_ = SetSystem.from_sets(9, 9, {1: list(range(1, 10)), **{s: [s] for s in range(2, 10)}})
    rep = sublinear_set_cover(Oracle(sys_), 2.0, 0.5, CFG, stream(14, "t"))
    assert rep.status == "ok"
    assert rep.route == "small"
    assert rep.cover_size() <= 2


def test_sublinear_routes_large_for_big_optimum():
    m = 256
    k = 4 * math.isqrt(m)  # 64 >= sqrt(m)
    sys_ = gen_planted_instance(m, 256, k, stream(15, "gen/planted"))
    rep = sublinear_set_cover(Oracle(sys_), 2.0, 0.5, CFG, stream(15, "t"))
    assert rep.status == "ok"
    assert rep.route == "large"
    assert verify_cover_naive(Oracle(sys_), rep.cover).covered


def test_solver_determinism_identical_reports():
    sys_ = gen_planted_instance(128, 128, 8, stream(16, "gen/planted"))
    runs = []
    for _ in range(2):
        o = Oracle(sys_)
        runs.append(small_set_cover(o, 2.0, 0.5, CFG, stream(16, "solve/small")))
    a, b = runs
    assert a.cover.set_ids == b.cover.set_ids
    assert (a.elt_of_queries, a.set_of_queries) == (b.elt_of_queries, b.set_of_queries)
    assert a.guesses_tried == b.guesses_tried
    assert a.trace == b.trace


def test_stage2_accepted_guess_offline_cost_shrinks_with_k():
    """The offline fetch at the accepted guess scales like m*(n/k) at alpha=2."""
    n = 256
    medians = []
    for k in (4, 8, 16, 32):
        vals = []
        for seed in range(1, 21):
            sys_ = gen_planted_instance(256, 256, k, stream(seed, "gen/planted"))
            o = Oracle(sys_)
            rng = stream(seed, "solve/small")
            alpha1 = max(2, math.ceil(math.log(n)))
            st1 = iter_set_cover(o, float(alpha1), 1.0, 1, n, CFG, rng)
            k_est = len(st1.cover)
            rho = rho_greedy(n)
            lo = max(1, math.floor(k_est / (rho * math.log(n))))
            hi = max(lo, min(n, math.ceil(k_est * (1 + 0.5 / (4 * rho)))))
            st2 = iter_set_cover(o, 2.0, 0.5, lo, hi, CFG, rng)
            assert st2.status == "ok"
            ell_star = st2.guesses_tried[-1]
            probe = Oracle(sys_)
            iter_set_cover(probe, 2.0, 0.5, ell_star, ell_star, CFG,
                           stream(seed + 500, "probe"))
            vals.append(probe.set_of_queries)
        medians.append(statistics.median(vals))
    assert all(a >= b for a, b in zip(medians, medians[1:])), medians
