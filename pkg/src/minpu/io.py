"""Instance generation plus instance and solution file formats (JSON text)."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .assembly import AssemblyResult
from .geometry import Instance, UnitSquare, check_genericity, covered_points, format_coord, perturb
from .reduction import MinpuResult

PathLike = Union[str, Path]

GRID_DENOMINATOR = 1000


def generate_instance(n: int, m: int, extent: int, seed: int) -> Instance:
    """Points and lower-left square corners on a 1/1000 grid strictly inside ``[0, extent]^2``."""
    if n < 0 or m < 0 or extent < 1:
        raise ValueError("need n, m >= 0 and extent >= 1")
    rng = random.Random(seed)
    top = extent * GRID_DENOMINATOR

    def coord() -> Fraction:
        return Fraction(rng.randint(1, top - 1), GRID_DENOMINATOR)

    points = tuple((coord(), coord()) for _ in range(n))
    squares = tuple(UnitSquare(i, coord(), coord()) for i in range(m))
    inst = Instance(points, squares)
    if not check_genericity(inst).ok:
        inst = perturb(inst, seed)
    return inst


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def read_instance(path: PathLike) -> Instance:
    with open(path) as fh:
        return Instance.from_dict(json.load(fh))


def write_instance(instance: Instance, path: PathLike) -> None:
    Path(path).write_text(dumps(instance.to_dict()))


def dksh_solution(res: AssemblyResult, epsilon, with_time: bool = False) -> dict:
    stats = {"states": [dict(s) for s in res.states]}
    if with_time:
        stats["wall_time"] = round(res.wall_time, 6)
    return {
        "problem": "dksh",
        "k": res.k,
        "epsilon": format_coord(Fraction(epsilon)),
        "a": res.a,
        "selected_squares": list(res.selected),
        "covered_points": list(res.covered),
        "shift_r": res.r,
        "K_t": res.K_t,
        "cost_c": res.cost,
        "blocks": [
            {"cell": list(b.cell), "k": b.k, "weight": b.weight, "squares": list(b.squares)}
            for b in res.blocks
        ],
        "stats": stats,
    }


def minpu_solution(res: MinpuResult, p: int, epsilon, with_time: bool = False) -> dict:
    inner: AssemblyResult = res.dksh
    out = dksh_solution(inner, epsilon, with_time)
    out["problem"] = "minpu"
    out = {"problem": "minpu", "p": p, **{k: v for k, v in out.items() if k != "problem"}}
    out["selected_squares"] = list(res.selected)
    out["covered_points"] = list(res.covered)
    out["threshold"] = format_coord(res.trace.threshold)
    out["trace"] = [{"k": k, "count": c} for k, c in res.trace.counts]
    return out


def write_solution(solution: dict, path: PathLike) -> None:
    Path(path).write_text(dumps(solution))


def read_solution(path: PathLike) -> dict:
    with open(path) as fh:
        return json.load(fh)


def check_solution(solution: dict, instance: Instance) -> Optional[str]:
    """None when the stored covered list matches a recomputation, else a message."""
    want = sorted(covered_points(solution["selected_squares"], instance))
    if want != list(solution["covered_points"]):
        return f"stored covered points {solution['covered_points']} != recomputed {want}"
    return None
