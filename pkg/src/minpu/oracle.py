"""Brute-force exact solvers used as ground truth.

These enumerate subsets directly and are meant for desk-scale instances only.
They deliberately avoid any pruning so that their correctness is evident.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Optional

from .geometry import Instance

DEFAULT_GUARD = 10**7


class InfeasibleParameter(ValueError):
    pass


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    selected: frozenset[int]
    objective: int


def _coverage(ids: Iterable[int], masks: tuple[int, ...]) -> int:
    mask = 0
    for i in ids:
        mask |= masks[i]
    return mask.bit_count()


def _all_subsets(items: list[int]):
    # sizes ascending, each size in lexicographic order
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def brute_minpu(instance: Instance, p: int, guard: int = DEFAULT_GUARD) -> OracleResult:
    m = instance.m
    if not 1 <= p <= m:
        raise InfeasibleParameter(f"p={p} outside 1..{m}")
    if comb(m, p) > guard:
        raise EnumerationBudgetExceeded(f"C({m},{p}) exceeds guard {guard}")
    masks = instance.masks
    best = None
    best_cov = None
    for subset in combinations(range(m), p):
        cov = _coverage(subset, masks)
        if best_cov is None or cov < best_cov:
            best, best_cov = subset, cov
    return OracleResult(frozenset(best), best_cov)


def brute_dksh(instance: Instance, k: int, guard: int = DEFAULT_GUARD) -> OracleResult:
    if not 0 <= k <= instance.n:
        raise InfeasibleParameter(f"k={k} outside 0..{instance.n}")
    m = instance.m
    if 2**m > guard:
        raise EnumerationBudgetExceeded(f"2^{m} exceeds guard {guard}")
    masks = instance.masks
    best: tuple[int, ...] = ()
    for subset in _all_subsets(list(range(m))):
        if len(subset) > len(best) and _coverage(subset, masks) <= k:
            best = subset
    return OracleResult(frozenset(best), len(best))


def brute_block(
    instance: Instance, block_squares: Iterable[int], k_exact: int, guard: int = DEFAULT_GUARD
) -> Optional[OracleResult]:
    """Largest subset of ``block_squares`` covering exactly ``k_exact`` instance points."""
    items = sorted(set(block_squares))
    if 2 ** len(items) > guard:
        raise EnumerationBudgetExceeded(f"2^{len(items)} exceeds guard {guard}")
    masks = instance.masks
    best: Optional[tuple[int, ...]] = None
    for subset in _all_subsets(items):
        if _coverage(subset, masks) == k_exact and (best is None or len(subset) > len(best)):
            best = subset
    if best is None:
        return None
    return OracleResult(frozenset(best), len(best))


def brute_block_table(
    instance: Instance, block_squares: Iterable[int], guard: int = DEFAULT_GUARD
) -> dict[int, int]:
    """``k_exact -> max |S'|`` for every achievable exact coverage, one enumeration pass."""
    items = sorted(set(block_squares))
    if 2 ** len(items) > guard:
        raise EnumerationBudgetExceeded(f"2^{len(items)} exceeds guard {guard}")
    masks = instance.masks
    table: dict[int, int] = {}
    for subset in _all_subsets(items):
        cov = _coverage(subset, masks)
        if len(subset) > table.get(cov, -1):
            table[cov] = len(subset)
    return table
