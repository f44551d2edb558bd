"""MinpU-US through a DkSH-US solver: scan budgets until enough squares fit."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .assembly import ShiftingSolver, SolverConfig
from .geometry import Instance, covered_points


class NoFeasibleIndex(RuntimeError):
    pass


def threshold(p: int, epsilon) -> Fraction:
    """``p / (1 + epsilon)`` as an exact rational."""
    return Fraction(p) / (1 + Fraction(epsilon))


@dataclass
class ReductionTrace:
    counts: list[tuple[int, int]] = field(default_factory=list)  # (k, |S'_k|)
    ell: Optional[int] = None
    threshold: Fraction = Fraction(0)


@dataclass
class MinpuResult:
    selected: tuple[int, ...]
    covered: tuple[int, ...]
    trace: ReductionTrace
    dksh: object = None  # the DkSH result at k = ell


def solve_minpu_with(
    instance: Instance,
    p: int,
    alpha: Fraction,
    dksh: Callable[[int], object],
    selected_of: Callable[[object], Sequence[int]] = lambda res: res.selected,
    full_trace: bool = False,
) -> MinpuResult:
    """Generic reduction: first budget ``k`` whose DkSH answer holds ``alpha * p`` squares.

    The scan starts at ``k = 0`` so that instances with ``p`` empty squares
    come back with zero covered points.
    """
    if not 1 <= p <= instance.m:
        raise ValueError(f"p={p} outside 1..{instance.m}")
    need = Fraction(alpha) * p
    trace = ReductionTrace(threshold=need)
    chosen = None
    for k in range(instance.n + 1):
        res = dksh(k)
        count = len(selected_of(res))
        trace.counts.append((k, count))
        if chosen is None and count >= need:
            chosen = res
            trace.ell = k
            if not full_trace:
                break
    if chosen is None:
        raise NoFeasibleIndex(f"no k in 0..{instance.n} reaches {need} squares")
    selected = tuple(sorted(selected_of(chosen)))
    covered = tuple(sorted(covered_points(selected, instance)))
    return MinpuResult(selected, covered, trace, chosen)


def solve_minpu_us(
    instance: Instance,
    p: int,
    config: SolverConfig = SolverConfig(),
    full_trace: bool = False,
    solver: Optional[ShiftingSolver] = None,
) -> MinpuResult:
    solver = solver or ShiftingSolver(instance, config)
    alpha = 1 / (1 + Fraction(config.epsilon))
    return solve_minpu_with(instance, p, alpha, solver.solve, full_trace=full_trace)
