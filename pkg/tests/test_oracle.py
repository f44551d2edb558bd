import random
from itertools import combinations

import pytest

from minpu.geometry import Instance, covered_points
from minpu.io import generate_instance
from minpu.oracle import (
    EnumerationBudgetExceeded,
    InfeasibleParameter,
    brute_block,
    brute_block_table,
    brute_dksh,
    brute_minpu,
)


def two_disjoint():
    # square 0 holds one point, square 1 holds three
    return Instance.from_coords(
        [("0.5", "0.5"), ("3.5", "3.5"), ("3.6", "3.2"), ("3.4", "3.7")],
        [("0.1", "0.1"), ("3.15", "3.05")],
    )


def test_minpu_single_square():
    i = Instance.from_coords([("0.5", "0.5"), ("0.6", "0.4")], [("0.1", "0.1")])
    r = brute_minpu(i, 1)
    assert r.objective == 2 and r.selected == {0}


def test_minpu_picks_lighter_square():
    r = brute_minpu(two_disjoint(), 1)
    assert r.selected == {0} and r.objective == 1


def test_minpu_matches_reverse_order_scan():
    inst = generate_instance(12, 8, 3, seed=4)
    for p in range(1, 9):
        got = brute_minpu(inst, p)
        # independent scan: reverse lexicographic order, keep ties at the lex-smallest
        best = None
        for subset in reversed(list(combinations(range(8), p))):
            cov = len(covered_points(subset, inst))
            if best is None or cov < best[0] or (cov == best[0] and subset < best[1]):
                best = (cov, subset)
        assert got.objective == best[0]
        assert got.selected == frozenset(best[1])


def test_minpu_errors():
    with pytest.raises(InfeasibleParameter):
        brute_minpu(two_disjoint(), 0)
    with pytest.raises(InfeasibleParameter):
        brute_minpu(two_disjoint(), 3)
    with pytest.raises(EnumerationBudgetExceeded):
        brute_minpu(generate_instance(5, 30, 4, seed=1), 15, guard=1000)


def test_dksh_examples():
    i = two_disjoint()
    r0 = brute_dksh(i, 0)
    assert r0.objective == 0 and r0.selected == frozenset()
    assert brute_dksh(i, i.n).objective == i.m
    assert brute_dksh(i, 1).selected == {0}


def test_dksh_empty_squares_always_included():
    i = Instance.from_coords([("0.5", "0.5")], [("0.1", "0.1"), ("5.2", "5.3")])
    assert brute_dksh(i, 0).selected == {1}


def test_dksh_random_matches_exhaustive():
    inst = generate_instance(12, 8, 3, seed=9)
    want = max(
        len(s)
        for size in range(9)
        for s in combinations(range(8), size)
        if len(covered_points(s, inst)) <= 5
    )
    assert brute_dksh(inst, 5).objective == want


def test_dksh_errors():
    with pytest.raises(InfeasibleParameter):
        brute_dksh(two_disjoint(), 5)
    with pytest.raises(EnumerationBudgetExceeded):
        brute_dksh(generate_instance(3, 25, 4, seed=1), 1)


def test_brute_block_examples():
    i = Instance.from_coords([("0.5", "0.5"), ("0.6", "0.4")], [("0.1", "0.1")])
    assert brute_block(i, [0], 1) is None
    r = brute_block(i, [0], 0)
    assert r.objective == 0 and r.selected == frozenset()
    assert brute_block(i, [0], 2).objective == 1


def test_brute_block_table_agrees_with_per_k():
    inst = generate_instance(10, 6, 2, seed=3)
    table = brute_block_table(inst, range(6))
    for k in range(11):
        r = brute_block(inst, range(6), k)
        assert (r is None) == (k not in table)
        if r is not None:
            assert r.objective == table[k]
            assert len(covered_points(r.selected, inst)) == k


def test_oracle_properties_on_random_instances():
    rng = random.Random(0)
    for _ in range(25):
        inst = generate_instance(rng.randint(1, 10), rng.randint(1, 7), 2, rng.randrange(10**6))
        dk = [brute_dksh(inst, k).objective for k in range(inst.n + 1)]
        mp = [brute_minpu(inst, p).objective for p in range(1, inst.m + 1)]
        assert dk == sorted(dk)
        assert mp == sorted(mp)
        table = brute_block_table(inst, range(inst.m))
        for k in range(inst.n + 1):
            assert dk[k] == max(v for kk, v in table.items() if kk <= k)
            for p in range(1, inst.m + 1):
                if dk[k] >= p:
                    assert mp[p - 1] <= k
