"""Randomised checks of the solvers against the brute-force oracles.

Each suite draws seeded instances, runs the solver and the matching oracle,
and records any disagreement together with a shrunken copy of the offending
instance so it can be replayed from a file.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .assembly import ShiftingSolver, SolverConfig
from .blockdp import BlockContext, max_weight_paths, random_walk, validate_path
from .geometry import Instance, UnitSquare, check_genericity, covered_points
from .io import generate_instance
from .oracle import DEFAULT_GUARD, brute_block_table, brute_dksh, brute_minpu
from .reduction import solve_minpu_us, threshold

SUITES = ("block", "walks", "dksh", "minpu", "multiplicity")

GRID = 1000


def random_block_instance(rng: random.Random, a: int, m: int, n: int) -> Instance:
    """Generic instance whose squares all meet the block ``[0, a]^2``.

    Three in four points are dropped inside a random square so coverage
    overlaps are common; the rest are uniform on ``[-1, a + 1]^2``, so some
    covered points sit outside the block.  Point offsets of 1/3000 and 1/7000
    keep them off every square boundary (which lies on the 1/1000 grid).
    """
    while True:
        squares = tuple(
            UnitSquare(
                i,
                Fraction(rng.randrange(-GRID + 1, a * GRID), GRID),
                Fraction(rng.randrange(-GRID + 1, a * GRID), GRID),
            )
            for i in range(m)
        )
        points = []
        for _ in range(n):
            if squares and rng.random() < 0.75:
                s = rng.choice(squares)
                x = s.lx + Fraction(rng.randrange(0, GRID), GRID)
                y = s.ly + Fraction(rng.randrange(0, GRID), GRID)
            else:
                x = Fraction(rng.randrange(-GRID, (a + 1) * GRID), GRID)
                y = Fraction(rng.randrange(-GRID, (a + 1) * GRID), GRID)
            points.append((x + Fraction(1, 3 * GRID), y + Fraction(1, 7 * GRID)))
        inst = Instance(tuple(points), squares)
        if check_genericity(inst).ok:
            return inst


def drop(instance: Instance, points=(), squares=()) -> Instance:
    """Copy of ``instance`` without the given point and square indices (re-indexed)."""
    points, squares = set(points), set(squares)
    pts = tuple(p for i, p in enumerate(instance.points) if i not in points)
    kept = [s for s in instance.squares if s.id not in squares]
    return Instance(pts, tuple(UnitSquare(i, s.lx, s.ly) for i, s in enumerate(kept)))


def minimize(instance: Instance, fails: Callable[[Instance], bool]) -> Instance:
    """Greedy one-at-a-time deletion of points, then squares, while ``fails`` holds."""
    cur = instance
    changed = True
    while changed:
        changed = False
        for kind in ("points", "squares"):
            i = 0
            while i < (cur.n if kind == "points" else cur.m):
                cand = drop(cur, **{kind: [i]})
                try:
                    still = fails(cand)
                except Exception:
                    still = False
                if still:
                    cur = cand
                    changed = True
                else:
                    i += 1
    return cur


@dataclass
class Failure:
    suite: str
    trial: int
    message: str
    instance: Instance
    minimized: Optional[Instance] = None

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "trial": self.trial, "message": self.message, "instance": self.instance.to_dict()}
        if self.minimized is not None:
            out["minimized"] = self.minimized.to_dict()
        return out


@dataclass
class SuiteResult:
    name: str
    trials: int
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class VerifyConfig:
    trials: int = 50
    seed: int = 1
    a: Optional[int] = None  # block side for block/walks; None draws from {1, 2}
    epsilon: Fraction = Fraction(1)
    max_n: Optional[int] = None
    max_m: Optional[int] = None
    extent: int = 3
    guard: int = DEFAULT_GUARD
    walks_per_trial: int = 5
    arc_weight_hook: Optional[Callable] = None  # fault injection for the block suite


# -- individual checks; each returns a message on failure --------------------


def check_block(instance: Instance, cfg: VerifyConfig) -> Optional[str]:
    ctx = BlockContext(instance, range(instance.m))
    table = max_weight_paths(ctx, arc_weight_hook=cfg.arc_weight_hook)
    want = brute_block_table(instance, range(instance.m), cfg.guard)
    got = table.weights()
    if got != want:
        diff = sorted(k for k in set(got) | set(want) if got.get(k) != want.get(k))
        k = diff[0]
        return f"k_exact={k}: dp weight {got.get(k)} != oracle {want.get(k)}"
    for k, entry in table.entries.items():
        if len(entry.selected) != entry.weight:
            return f"k_exact={k}: weight {entry.weight} but {len(entry.selected)} squares selected"
        cov = len(covered_points(entry.selected, instance))
        if cov != k:
            return f"k_exact={k}: selected squares cover {cov} points"
    return None


def check_walks(instance: Instance, cfg: VerifyConfig, rng: random.Random) -> tuple[int, Optional[str]]:
    ctx = BlockContext(instance, range(instance.m))
    for w in range(cfg.walks_per_trial):
        rep = validate_path(ctx, random_walk(ctx, rng))
        if not rep.ok:
            return w + 1, rep.violation
    return cfg.walks_per_trial, None


def check_dksh(instance: Instance, cfg: VerifyConfig, solver: Optional[ShiftingSolver] = None) -> Optional[str]:
    solver = solver or ShiftingSolver(instance, SolverConfig(cfg.epsilon))
    alpha = 1 / (1 + Fraction(cfg.epsilon))
    for k in range(instance.n + 1):
        res = solver.solve(k)
        opt = brute_dksh(instance, k, cfg.guard).objective
        cov = len(covered_points(res.selected, instance))
        if cov > 4 * k:
            return f"k={k}: covers {cov} > 4k={4 * k}"
        if len(res.selected) < math.ceil(alpha * opt):
            return f"k={k}: {len(res.selected)} squares < ceil({alpha} * {opt})"
    return None


def check_minpu(instance: Instance, cfg: VerifyConfig, solver: Optional[ShiftingSolver] = None) -> Optional[str]:
    config = SolverConfig(cfg.epsilon)
    solver = solver or ShiftingSolver(instance, config)
    for p in range(1, instance.m + 1):
        res = solve_minpu_us(instance, p, config, solver=solver)
        opt = brute_minpu(instance, p, cfg.guard).objective
        if len(res.selected) < threshold(p, cfg.epsilon):
            return f"p={p}: {len(res.selected)} squares < {threshold(p, cfg.epsilon)}"
        if len(res.covered) > 4 * opt:
            return f"p={p}: covers {len(res.covered)} > 4 * {opt}"
    return None


def check_multiplicity(instance: Instance, cfg: VerifyConfig, solver: Optional[ShiftingSolver] = None) -> Optional[str]:
    solver = solver or ShiftingSolver(instance, SolverConfig(cfg.epsilon))
    for k in range(instance.n + 1):
        res = solver.solve(k)
        worst = max(res.multiplicity().values(), default=0)
        if worst > 4:
            return f"k={k}: a square is used by {worst} blocks"
        total = sum(b.k for b in res.blocks)
        if total != res.K_t or res.K_t > 4 * k:
            return f"k={k}: block budgets sum to {total}, K_t={res.K_t}, 4k={4 * k}"
    return None


# -- suites --------------------------------------------------------------------


def _block_instances(cfg: VerifyConfig, rng: random.Random):
    max_m = cfg.max_m if cfg.max_m is not None else 7
    max_n = cfg.max_n if cfg.max_n is not None else 12
    for trial in range(cfg.trials):
        a = cfg.a if cfg.a is not None else rng.choice((1, 2))
        yield trial, random_block_instance(rng, a, rng.randint(1, max_m), rng.randint(0, max_n))


def _plane_instances(cfg: VerifyConfig, rng: random.Random):
    max_m = cfg.max_m if cfg.max_m is not None else 10
    max_n = cfg.max_n if cfg.max_n is not None else 20
    for trial in range(cfg.trials):
        n, m = rng.randint(1, max_n), rng.randint(1, max_m)
        yield trial, generate_instance(n, m, cfg.extent, rng.randrange(2**31))


def run_suite(name: str, cfg: VerifyConfig, minimize_failures: bool = True) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = random.Random(f"{name}:{cfg.seed}")
    result = SuiteResult(name, cfg.trials)

    if name == "block":
        source, check = _block_instances(cfg, rng), lambda inst: check_block(inst, cfg)
    elif name == "walks":
        walk_rng = random.Random(f"walks-rng:{cfg.seed}")

        def check(inst):
            count, msg = check_walks(inst, cfg, walk_rng)
            result.checks += count - 1
            return msg

        source = _block_instances(cfg, rng)
    else:
        fn = {"dksh": check_dksh, "minpu": check_minpu, "multiplicity": check_multiplicity}[name]
        source, check = _plane_instances(cfg, rng), lambda inst: fn(inst, cfg)

    for trial, inst in source:
        result.checks += 1
        msg = check(inst)
        if msg is None:
            continue
        failure = Failure(name, trial, msg, inst)
        if minimize_failures and name != "walks":
            failure.minimized = minimize(inst, lambda cand: check(cand) is not None)
        result.failures.append(failure)
        break  # first counterexample is enough
    return result


def run_verify(cfg: VerifyConfig, suites=SUITES) -> list[SuiteResult]:
    return [run_suite(name, cfg) for name in suites]
