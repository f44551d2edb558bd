import random
from fractions import Fraction as F

import pytest

from minpu.assembly import ShiftingSolver, SolverConfig
from minpu.geometry import Instance
from minpu.io import generate_instance
from minpu.oracle import brute_dksh, brute_minpu
from minpu.reduction import NoFeasibleIndex, solve_minpu_us, solve_minpu_with, threshold


def test_threshold_examples():
    assert threshold(4, 1) == 2
    assert threshold(3, F(1, 2)) == 2
    assert threshold(5, 1) == F(5, 2)
    assert not 2 >= threshold(5, 1) and 3 >= threshold(5, 1)


def test_single_square():
    inst = Instance.from_coords([("0.5", "0.5"), ("0.6", "0.4")], [("0.1", "0.1")])
    res = solve_minpu_us(inst, 1)
    assert res.selected == (0,) and res.covered == (0, 1)
    assert res.trace.ell == 1  # budget 4k = 4 already admits both points


def test_p_equals_m():
    inst = generate_instance(10, 6, 3, seed=2)
    res = solve_minpu_us(inst, inst.m)
    assert len(res.selected) >= 3  # ceil(6 / 2)


def test_bad_p():
    inst = Instance.from_coords([("0.5", "0.5")], [("0.1", "0.1")])
    with pytest.raises(ValueError):
        solve_minpu_us(inst, 0)
    with pytest.raises(ValueError):
        solve_minpu_us(inst, 2)


def test_generic_reduction_with_exact_oracle():
    # with alpha = 1 and an exact DkSH solver the reduction is exact MinpU
    inst = generate_instance(9, 6, 2, seed=5)
    for p in range(1, inst.m + 1):
        res = solve_minpu_with(inst, p, F(1), lambda k: brute_dksh(inst, k), lambda r: r.selected)
        assert len(res.covered) == brute_minpu(inst, p).objective
        assert len(res.selected) >= p


def test_no_feasible_index_is_reported():
    inst = Instance.from_coords([("0.5", "0.5")], [("0.1", "0.1")])
    with pytest.raises(NoFeasibleIndex):
        solve_minpu_with(inst, 1, F(1), lambda k: (), lambda r: r)


def test_full_trace_keeps_first_crossing():
    inst = generate_instance(8, 5, 3, seed=7)
    solver = ShiftingSolver(inst, SolverConfig(F(1)))
    short = solve_minpu_us(inst, 3, solver=solver)
    full = solve_minpu_us(inst, 3, full_trace=True, solver=solver)
    assert full.trace.ell == short.trace.ell
    assert full.selected == short.selected
    assert [k for k, _ in full.trace.counts] == list(range(inst.n + 1))
    assert full.trace.counts[: len(short.trace.counts)] == short.trace.counts


def test_bicriteria_against_oracle():
    rng = random.Random(3)
    for _ in range(15):
        inst = generate_instance(rng.randint(1, 16), rng.randint(1, 8), 3, rng.randrange(10**6))
        solver = ShiftingSolver(inst, SolverConfig(F(1)))
        for p in range(1, inst.m + 1):
            res = solve_minpu_us(inst, p, solver=solver)
            t = res.trace
            assert len(res.selected) >= threshold(p, 1)
            assert len(res.covered) <= 4 * brute_minpu(inst, p).objective
            # ell is the first crossing
            assert all(c < t.threshold for k, c in t.counts if k < t.ell)
            assert dict(t.counts)[t.ell] >= t.threshold
