"""Shifted partitions and assembly of block solutions for DkSH-US.

For each shift ``r`` the plane is cut into ``a x a`` blocks; every block with
squares is solved exactly by :mod:`minpu.blockdp` (one table over all exact
budgets), and the tables are combined with a knapsack-style recurrence over
point budgets.  A square crossing block lines is counted once per block, so
the combined cost is a multiset size; the returned square set is deduplicated.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .blockdp import DEFAULT_MAX_STATES, BlockContext, BlockSolutionTable, StateBudgetExceeded, max_weight_paths
from .geometry import Box, Instance, covered_points, require_generic, squares_intersecting_block


@dataclass(frozen=True)
class SolverConfig:
    epsilon: Fraction = Fraction(1)
    a_override: Optional[int] = None
    max_states: int = DEFAULT_MAX_STATES

    @property
    def a(self) -> int:
        if self.a_override is not None:
            return self.a_override
        return math.ceil(Fraction(3) / Fraction(self.epsilon))


@dataclass(frozen=True)
class PartitionPlan:
    r: int
    a: int
    origin: tuple[int, int]
    N: int
    blocks: tuple[Box, ...]
    index: tuple[tuple[int, int], ...]  # (column, row) of each block


def bounding_square(instance: Instance) -> tuple[int, int, int]:
    """Integer-anchored square ``[x0, x0+a0] x [y0, y0+a0]`` enclosing everything.

    Points end strictly below the upper edges so half-open block membership
    never drops one.
    """
    xs_lo, ys_lo, xs_hi, ys_hi = [], [], [], []
    for px, py in instance.points:
        xs_lo.append(math.floor(px))
        ys_lo.append(math.floor(py))
        xs_hi.append(math.floor(px) + 1)
        ys_hi.append(math.floor(py) + 1)
    for s in instance.squares:
        xs_lo.append(math.floor(s.lx))
        ys_lo.append(math.floor(s.ly))
        xs_hi.append(math.ceil(s.lx + 1))
        ys_hi.append(math.ceil(s.ly + 1))
    if not xs_lo:
        return 0, 0, 1
    x0, y0 = min(xs_lo), min(ys_lo)
    a0 = max(max(xs_hi) - x0, max(ys_hi) - y0, 1)
    return x0, y0, a0


def build_partitions(instance: Instance, a: int) -> list[PartitionPlan]:
    if a < 1:
        raise ValueError("block side a must be >= 1")
    x0, y0, a0 = bounding_square(instance)
    N = -(-a0 // a)
    plans = []
    for r in range(a):
        ox, oy = x0 - a + r, y0 - a + r
        blocks, index = [], []
        for row in range(N + 1):
            for col in range(N + 1):
                blocks.append(
                    Box(
                        Fraction(ox + col * a),
                        Fraction(oy + row * a),
                        Fraction(ox + (col + 1) * a),
                        Fraction(oy + (row + 1) * a),
                    )
                )
                index.append((col, row))
        plans.append(PartitionPlan(r, a, (ox, oy), N, tuple(blocks), tuple(index)))
    return plans


def block_of_point(plan: PartitionPlan, point) -> int:
    """Index of the unique block holding ``point`` (half-open cells)."""
    px, py = point
    col = math.floor((px - plan.origin[0]) / plan.a)
    row = math.floor((py - plan.origin[1]) / plan.a)
    if not (0 <= col <= plan.N and 0 <= row <= plan.N):
        raise ValueError(f"point {point} outside partition {plan.r}")
    return row * (plan.N + 1) + col


@dataclass(frozen=True)
class BlockChoice:
    block: int
    cell: tuple[int, int]
    k: int
    weight: int
    squares: tuple[int, ...]


@dataclass
class AssemblyResult:
    r: int
    a: int
    k: int
    K_t: int
    cost: int
    selected: tuple[int, ...]
    covered: tuple[int, ...]
    blocks: list[BlockChoice]
    states: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    def multiplicity(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for b in self.blocks:
            for s in b.squares:
                counts[s] = counts.get(s, 0) + 1
        return counts


@dataclass
class BudgetTable:
    """``cost[i][K]`` over the first ``i`` processed blocks; ``choice`` holds back-pointers."""

    blocks: list[int]
    cost: list[dict[int, int]]
    choice: list[dict[int, int]]

    def best(self, limit: int) -> Optional[tuple[int, int]]:
        """(K_t, cost) maximising cost with K_t <= limit, smallest K_t on ties."""
        final = self.cost[-1]
        best = None
        for K in sorted(final):
            if K > limit:
                break
            if best is None or final[K] > best[1]:
                best = (K, final[K])
        return best

    def split(self, K_t: int) -> list[int]:
        """Per-block budgets ``k_j`` summing to ``K_t``."""
        ks = []
        K = K_t
        for i in range(len(self.blocks), 0, -1):
            k = self.choice[i][K]
            ks.append(k)
            K -= k
        assert K == 0
        return ks[::-1]


def combine_tables(block_ids: list[int], tables: list[dict[int, int]], limit: Optional[int] = None) -> BudgetTable:
    """Fill the budget recurrence; absent keys are -infinity."""
    cost = [{0: 0}]
    choice: list[dict[int, int]] = [{}]
    for table in tables:
        prev = cost[-1]
        cur: dict[int, int] = {}
        ch: dict[int, int] = {}
        for K_prev in sorted(prev):
            c_prev = prev[K_prev]
            for k in sorted(table):
                K = K_prev + k
                if limit is not None and K > limit:
                    break
                val = c_prev + table[k]
                if K not in cur or val > cur[K]:
                    cur[K] = val
                    ch[K] = k
        cost.append(dict(sorted(cur.items())))
        choice.append(ch)
    return BudgetTable(list(block_ids), cost, choice)


class ShiftingSolver:
    """DkSH-US over all shifts, with block tables computed once and reused for every ``k``."""

    def __init__(self, instance: Instance, config: SolverConfig = SolverConfig(), check: bool = True):
        if check:
            require_generic(instance)
        self.instance = instance
        self.config = config
        self.a = config.a
        self.plans = build_partitions(instance, self.a)
        self._block_cache: dict[frozenset, BlockSolutionTable] = {}
        self._shift_cache: dict[int, tuple] = {}

    def block_table(self, square_ids: frozenset, where: str = "") -> BlockSolutionTable:
        table = self._block_cache.get(square_ids)
        if table is None:
            ctx = BlockContext(self.instance, square_ids)
            try:
                table = max_weight_paths(ctx, max_states=self.config.max_states)
            except StateBudgetExceeded as exc:
                raise StateBudgetExceeded(exc.states, exc.cap, where or exc.where) from None
            self._block_cache[square_ids] = table
        return table

    def shift(self, r: int):
        """(plan, processed block indices, square sets, tables, budget) for shift ``r``."""
        cached = self._shift_cache.get(r)
        if cached is not None:
            return cached
        plan = self.plans[r]
        block_ids, square_sets, tables = [], [], []
        for bi, box in enumerate(plan.blocks):
            sq = frozenset(squares_intersecting_block(self.instance, box))
            if not sq:
                continue
            col, row = plan.index[bi]
            tables.append(self.block_table(sq, f"shift {r} block ({col},{row})"))
            block_ids.append(bi)
            square_sets.append(sq)
        budget = combine_tables(block_ids, [t.weights() for t in tables])
        cached = (plan, block_ids, square_sets, tables, budget)
        self._shift_cache[r] = cached
        return cached

    def solve_shift(self, r: int, k: int) -> AssemblyResult:
        start = time.perf_counter()
        plan, block_ids, square_sets, tables, budget = self.shift(r)
        K_t, cost = budget.best(4 * k)
        ks = budget.split(K_t)
        chosen = []
        selected: set[int] = set()
        for bi, table, kj in zip(block_ids, tables, ks):
            entry = table[kj]
            chosen.append(BlockChoice(bi, plan.index[bi], kj, entry.weight, tuple(sorted(entry.selected))))
            selected |= entry.selected
        covered = covered_points(selected, self.instance)
        states = [
            {"shift": r, "block": list(plan.index[bi]), "squares": len(sq), "states": t.states}
            for bi, sq, t in zip(block_ids, square_sets, tables)
        ]
        return AssemblyResult(
            r=r,
            a=self.a,
            k=k,
            K_t=K_t,
            cost=cost,
            selected=tuple(sorted(selected)),
            covered=tuple(sorted(covered)),
            blocks=chosen,
            states=states,
            wall_time=time.perf_counter() - start,
        )

    def solve(self, k: int) -> AssemblyResult:
        if not 0 <= k <= self.instance.n:
            raise ValueError(f"k={k} outside 0..{self.instance.n}")
        start = time.perf_counter()
        best = None
        states = []
        for r in range(self.a):
            res = self.solve_shift(r, k)
            states.extend(res.states)
            if best is None or res.cost > best.cost:
                best = res
        best.states = states
        best.wall_time = time.perf_counter() - start
        return best


def solve_partition(plan: PartitionPlan, instance: Instance, k: int, config: SolverConfig = SolverConfig()) -> AssemblyResult:
    solver = ShiftingSolver(instance, SolverConfig(config.epsilon, plan.a, config.max_states))
    return solver.solve_shift(plan.r, k)


def solve_dksh_us(instance: Instance, k: int, config: SolverConfig = SolverConfig()) -> AssemblyResult:
    return ShiftingSolver(instance, config).solve(k)
