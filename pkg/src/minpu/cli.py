"""Command line entry point: ``minpu <command> [flags]``.

Commands: gen, solve-dksh, solve-minpu, verify, render, bench.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Optional

from .assembly import AssemblyResult, ShiftingSolver, SolverConfig
from .blockdp import DEFAULT_MAX_STATES, BlockContext, StateBudgetExceeded, format_trace
from .geometry import GenericityError, parse_coord
from .io import dksh_solution, dumps, generate_instance, minpu_solution, read_instance, read_solution, write_solution
from .oracle import DEFAULT_GUARD, EnumerationBudgetExceeded, InfeasibleParameter
from .reduction import NoFeasibleIndex, solve_minpu_us

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_STATES = 3


def _epsilon(text: str) -> Fraction:
    try:
        eps = parse_coord(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if eps <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return eps


def _config(args) -> SolverConfig:
    return SolverConfig(args.epsilon, args.a, args.max_states)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_trace(path: str, solver: ShiftingSolver, res: AssemblyResult) -> None:
    _, block_ids, square_sets, tables, _ = solver.shift(res.r)
    lines = []
    for choice in res.blocks:
        i = block_ids.index(choice.block)
        squares = sorted(square_sets[i])
        lines.append(f"# shift {res.r} block {choice.cell} k={choice.k} weight={choice.weight} squares={squares}")
        ctx = BlockContext(solver.instance, squares)
        lines.extend(format_trace(ctx, tables[i][choice.k].path))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _summary(res: AssemblyResult, elapsed: float) -> list[str]:
    states = sum(s["states"] for s in res.states)
    return [
        f"shift r={res.r} a={res.a} K_t={res.K_t} cost={res.cost}",
        f"states explored: {states} over {len(res.states)} block solves",
        f"runtime: {elapsed:.3f}s",
    ]


# -- commands --------------------------------------------------------------------


def cmd_gen(args) -> int:
    inst = generate_instance(args.n, args.m, args.extent, args.seed)
    _emit(dumps(inst.to_dict()), args.output)
    return 0


def cmd_solve_dksh(args) -> int:
    inst = read_instance(args.input)
    start = time.perf_counter()
    solver = ShiftingSolver(inst, _config(args))
    res = solver.solve(args.k)
    elapsed = time.perf_counter() - start
    sol = dksh_solution(res, args.epsilon)
    if args.output:
        write_solution(sol, args.output)
    else:
        sys.stdout.write(dumps(sol))
    if args.trace:
        _write_trace(args.trace, solver, res)
    out = sys.stderr if not args.output else sys.stdout
    print(f"selected {len(res.selected)} squares, covering {len(res.covered)} points", file=out)
    print(f"coverage bound: {len(res.covered)} <= 4k = {4 * args.k}", file=out)
    for line in _summary(res, elapsed):
        print(line, file=out)
    return 0


def cmd_solve_minpu(args) -> int:
    inst = read_instance(args.input)
    start = time.perf_counter()
    solver = ShiftingSolver(inst, _config(args))
    res = solve_minpu_us(inst, args.p, _config(args), solver=solver)
    elapsed = time.perf_counter() - start
    sol = minpu_solution(res, args.p, args.epsilon)
    if args.output:
        write_solution(sol, args.output)
    else:
        sys.stdout.write(dumps(sol))
    if args.trace:
        _write_trace(args.trace, solver, res.dksh)
    out = sys.stderr if not args.output else sys.stdout
    print(f"selected {len(res.selected)} squares, covering {len(res.covered)} points", file=out)
    print(f"count bound: {len(res.selected)} >= p/(1+eps) = {res.trace.threshold} (first k = {res.trace.ell})", file=out)
    for line in _summary(res.dksh, elapsed):
        print(line, file=out)
    return 0


def cmd_verify(args) -> int:
    from .verify import SUITES, VerifyConfig, run_verify

    cfg = VerifyConfig(
        trials=args.trials,
        seed=args.seed,
        a=args.a,
        epsilon=args.epsilon,
        max_n=args.n,
        max_m=args.m,
        extent=args.extent,
        guard=args.oracle_guard,
    )
    suites = SUITES if args.suite == "all" else (args.suite,)
    if cfg.trials == 0:
        print("warning: --trials 0, nothing checked", file=sys.stderr)
    results = run_verify(cfg, suites)
    failures = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status}\t{r.name}\ttrials={r.trials}\tchecks={r.checks}")
        failures.extend(r.failures)
    if failures:
        report = {"failures": [f.to_dict() for f in failures]}
        for f in failures:
            print(f"counterexample ({f.suite}, trial {f.trial}): {f.message}", file=sys.stderr)
        _emit(dumps(report), args.output)
        return EXIT_FAIL
    return 0


def cmd_render(args) -> int:
    from .render import render

    inst = read_instance(args.input)
    sol = read_solution(args.solution) if args.solution else None
    render(inst, args.output, sol)
    return 0


def cmd_bench(args) -> int:
    from .bench import HEADER, parse_schedule, run_ladder

    ms = parse_schedule(args.m)
    a = args.a if args.a is not None else 1
    print(HEADER)
    for row in run_ladder(ms, args.n, a, args.seed, args.max_states):
        print(row.line(), flush=True)
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minpu", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--epsilon", type=_epsilon, default=Fraction(1), help="decimal, > 0 (default 1)")
        p.add_argument("--a", type=int, default=None, help="block side; default ceil(3/epsilon)")
        p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES, help="per-block state cap")

    p = sub.add_parser("gen", help="write a seeded random generic instance")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--m", type=int, required=True, help="number of squares")
    p.add_argument("--extent", type=int, default=4, help="coordinates lie in [0, extent]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="instance file (default stdout)")
    p.set_defaults(func=cmd_gen)

    for name, func, budget in (("solve-dksh", cmd_solve_dksh, "--k"), ("solve-minpu", cmd_solve_minpu, "--p")):
        p = sub.add_parser(name, help=f"solve {name[6:]} on an instance file")
        p.add_argument("--input", required=True)
        p.add_argument("--output", help="solution file (default stdout)")
        p.add_argument(budget, type=int, required=True)
        p.add_argument("--trace", help="write the chosen block paths, one arc per line")
        solver_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="check solvers against brute-force oracles")
    p.add_argument("--suite", default="all", choices=("all", "block", "walks", "dksh", "minpu", "multiplicity"))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n", type=int, default=None, help="max points per instance")
    p.add_argument("--m", type=int, default=None, help="max squares per instance")
    p.add_argument("--extent", type=int, default=3)
    p.add_argument("--oracle-guard", type=int, default=DEFAULT_GUARD)
    p.add_argument("--output", help="failure report file (default stdout)")
    p.add_argument("--epsilon", type=_epsilon, default=Fraction(1), help="decimal, > 0 (default 1)")
    p.add_argument("--a", type=int, default=None, help="block side for the block suites (default: 1 or 2)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="draw an instance (and solution) as SVG")
    p.add_argument("--input", required=True)
    p.add_argument("--solution", help="solution file to overlay")
    p.add_argument("--output", required=True, help="SVG file")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="block DP states and time over a square-count ladder")
    p.add_argument("--m", default="1..6", help="N, LO..HI or comma list (default 1..6)")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--a", type=int, default=None, help="block side (default 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GenericityError as exc:
        print("error: instance is not in generic position", file=sys.stderr)
        for kind, idx in exc.report.violations:
            print(f"  {kind} {list(idx)}", file=sys.stderr)
        print("hint: repair with minpu.geometry.perturb", file=sys.stderr)
        return EXIT_USAGE
    except StateBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATES
    except (InfeasibleParameter, NoFeasibleIndex, EnumerationBudgetExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
