"""Oracle semantics, swaps, and naive cover verification."""

import numpy as np
import pytest

from subcover.core import (
    BudgetExhausted,
    Cover,
    Oracle,
    PreconditionError,
    SetSystem,
    apply_swap,
    verify_cover_naive,
)
from subcover.lowerbound import gen_slab_instance
from subcover.rng import stream


def toy_system():
    # S1={1,2}, S2={2,3}, S3={1,3}, S4={3}
    return SetSystem.from_sets(4, 3, {1: [1, 2], 2: [2, 3], 3: [1, 3], 4: [3]})


def test_oracle_positions_and_nulls():
    o = Oracle(toy_system())
    assert o.elt_of(1, 1) == 1
    assert o.elt_of(1, 2) == 2
    assert o.elt_of(1, 3) is None  # j = |S|+1 answers null
    assert o.set_of(3, 1) == 2
    assert o.set_of(3, 3) == 4
    assert o.set_of(3, 4) is None
    assert o.elt_of_queries == 3
    assert o.set_of_queries == 3


def test_oracle_counters_count_every_answer():
    o = Oracle(toy_system())
    for j in range(1, 6):
        o.elt_of(2, j)
    assert o.elt_of_queries == 5
    assert o.set_of_queries == 0
    assert o.enumerate_set(1) == [1, 2]
    assert o.elt_of_queries == 5 + 3  # |S1| + 1 terminating null
    assert o.enumerate_element(3) == [2, 3, 4]
    assert o.set_of_queries == 4


def test_oracle_rejects_bad_ids_without_charging():
    o = Oracle(toy_system())
    with pytest.raises(PreconditionError):
        o.elt_of(0, 1)
    with pytest.raises(PreconditionError):
        o.elt_of(5, 1)
    with pytest.raises(PreconditionError):
        o.set_of(1, 0)
    assert o.elt_of_queries == 0 and o.set_of_queries == 0


def test_budget_blocks_without_side_effects():
    o = Oracle(toy_system(), budget=2)
    assert o.elt_of(1, 1) == 1
    assert o.set_of(1, 1) == 1
    with pytest.raises(BudgetExhausted):
        o.elt_of(1, 2)
    assert o.elt_of_queries == 1 and o.set_of_queries == 1
    # bulk enumeration charges exactly up to the budget, then stops
    o2 = Oracle(toy_system(), budget=2)
    with pytest.raises(BudgetExhausted):
        o2.enumerate_set(1)  # would cost 3
    assert o2.elt_of_queries == 2


def test_queries_do_not_mutate_system():
    sys_ = toy_system()
    before = [list(r) for r in sys_.elt_of], [list(r) for r in sys_.set_of]
    o = Oracle(sys_)
    o.enumerate_set(2)
    o.enumerate_element(1)
    assert ([list(r) for r in sys_.elt_of], [list(r) for r in sys_.set_of]) == before


def test_independent_oracles_have_independent_counters():
    sys_ = toy_system()
    a, b = Oracle(sys_), Oracle(sys_)
    a.elt_of(1, 1)
    assert (a.elt_of_queries, b.elt_of_queries) == (1, 0)


def test_apply_swap_moves_exactly_four_entries():
    sys_ = toy_system()
    # e=1 in S1\S2, e'=3 in S2\S1: the only legal S1 <-> S2 exchange
    rec = apply_swap(sys_, 1, 3, 1, 2)
    assert sys_.elt_of[0] == [3, 2]  # position of the old element reused
    assert sys_.elt_of[1] == [2, 1]
    assert sys_.set_of[0] == [2, 3]  # e1 now answered by S2 at the old index
    assert sys_.set_of[2] == [1, 3, 4]
    assert rec.positions == (
        ("elt_of", 1, 1),
        ("elt_of", 2, 2),
        ("set_of", 1, 1),
        ("set_of", 3, 1),
    )
    assert [len(r) for r in sys_.elt_of] == [2, 2, 2, 1]
    assert [len(r) for r in sys_.set_of] == [2, 2, 3]
    sys_.check_duality()


def test_apply_swap_preconditions():
    sys_ = toy_system()
    with pytest.raises(PreconditionError):
        apply_swap(sys_, 1, 1, 1, 2)  # same element
    with pytest.raises(PreconditionError):
        apply_swap(sys_, 2, 3, 1, 1)  # same set
    with pytest.raises(PreconditionError):
        apply_swap(sys_, 3, 1, 1, 2)  # e=3 not in S1
    with pytest.raises(PreconditionError):
        apply_swap(sys_, 2, 3, 1, 2)  # e=2 already in S2
    # nothing was mutated by the failed attempts
    assert sys_.elt_of == toy_system().elt_of


def test_swap_involution_restores_bytes():
    sys_ = toy_system()
    ref = sys_.copy()
    rec = apply_swap(sys_, 1, 3, 1, 2)
    apply_swap(sys_, *rec.inverse_args())
    assert sys_ == ref


def test_swap_then_rebuild_duality(seeded_cases=50):
    rng = stream(7, "test/core-swap")
    for _ in range(seeded_cases):
        m, n = int(rng.integers(3, 9)), int(rng.integers(3, 9))
        inc = rng.random((m, n)) < 0.5
        sys_ = SetSystem.from_incidence(inc)
        # find a random legal swap
        legal = [
            (e, ep, s, sp)
            for s in range(1, m + 1)
            for sp in range(1, m + 1)
            if s != sp
            for e in sys_.elt_of[s - 1]
            if e not in sys_.elt_of[sp - 1]
            for ep in sys_.elt_of[sp - 1]
            if ep not in sys_.elt_of[s - 1]
        ]
        if not legal:
            continue
        e, ep, s, sp = legal[int(rng.integers(len(legal)))]
        before = sys_.incidence().copy()
        apply_swap(sys_, e, ep, s, sp)
        rebuilt = sys_.rebuild_set_of()
        assert sorted(map(sorted, rebuilt)) == sorted(map(sorted, sys_.set_of))
        sys_.check_duality()
        after = sys_.incidence()
        assert (before != after).sum() == 4  # incidence cells flipped by one swap


def test_slab_oracle_answers_match_figure_tables():
    before = gen_slab_instance(12, 3, swaps=[None, None, None])
    o = Oracle(before.system)
    assert o.elt_of(3, 2) == 2
    assert o.set_of(2, 3) == 3
    after = gen_slab_instance(12, 3, swaps=[(3, 2), None, None])
    o2 = Oracle(after.system)
    assert o2.elt_of(3, 2) == 4
    assert o2.set_of(2, 3) == 9
    assert o2.set_of(4, 6) == 3


def test_verify_cover_naive_cost_and_witness():
    sys_ = toy_system()
    o = Oracle(sys_)
    check = verify_cover_naive(o, Cover([1, 2]))
    assert check.covered is True
    assert check.elt_of_queries == (2 + 1) + (2 + 1)
    assert o.set_of_queries == 0
    o2 = Oracle(sys_)
    check2 = verify_cover_naive(o2, Cover([2, 4]))
    assert check2.covered is False
    assert check2.witness == 1  # smallest uncovered id
    assert check2.elt_of_queries == (2 + 1) + (1 + 1)


def test_verify_all_sets_covers_when_degrees_positive():
    rng = stream(9, "test/core-verify")
    for _ in range(20):
        m, n = int(rng.integers(2, 8)), int(rng.integers(2, 8))
        inc = rng.random((m, n)) < 0.6
        for e in range(n):  # patch zero-degree elements
            if not inc[:, e].any():
                inc[int(rng.integers(m)), e] = True
        sys_ = SetSystem.from_incidence(inc)
        check = verify_cover_naive(Oracle(sys_), Cover(list(range(1, m + 1))))
        assert check.covered


def test_cover_rejects_duplicates():
    with pytest.raises(PreconditionError):
        Cover([1, 2, 2])
