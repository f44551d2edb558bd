"""SVG figures of instances and solutions.

Output is byte-stable: the SVG id salt is pinned and the date metadata dropped.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .assembly import build_partitions  # noqa: E402
from .geometry import Instance  # noqa: E402

STABLE_RC = {
    "svg.hashsalt": "minpu",
    "svg.fonttype": "path",
    "path.simplify": False,
}


def _limits(instance: Instance, pad: float = 0.5):
    xs = [float(x) for x, _ in instance.points]
    ys = [float(y) for _, y in instance.points]
    for s in instance.squares:
        xs += [float(s.lx), float(s.x)]
        ys += [float(s.ly), float(s.y)]
    if not xs:
        return (0.0, 1.0), (0.0, 1.0)
    return (min(xs) - pad, max(xs) + pad), (min(ys) - pad, max(ys) + pad)


def draw(instance: Instance, solution: Optional[dict] = None, ax=None):
    """Draw squares, points and, given a solution, its selection and block grid."""
    if ax is None:
        _, ax = plt.subplots(figsize=(6, 6))
    selected = set(solution["selected_squares"]) if solution else set()
    covered = set(solution["covered_points"]) if solution else set()

    for s in instance.squares:
        chosen = s.id in selected
        ax.add_patch(
            Rectangle(
                (float(s.lx), float(s.ly)),
                1.0,
                1.0,
                fill=chosen,
                facecolor="tab:blue" if chosen else "none",
                alpha=0.25 if chosen else 1.0,
                edgecolor="tab:blue",
                linewidth=0.8,
            )
        )
        if chosen:
            # outline again at full opacity so the edge does not fade with the fill
            ax.add_patch(
                Rectangle((float(s.lx), float(s.ly)), 1.0, 1.0, fill=False, edgecolor="tab:blue", linewidth=1.2)
            )

    plain = [p for i, p in enumerate(instance.points) if i not in covered]
    hit = [p for i, p in enumerate(instance.points) if i in covered]
    if plain:
        ax.scatter([float(x) for x, _ in plain], [float(y) for _, y in plain], s=12, color="0.3", zorder=3)
    if hit:
        ax.scatter(
            [float(x) for x, _ in hit], [float(y) for _, y in hit], s=40, color="tab:red", marker="o", zorder=4
        )

    (x0, x1), (y0, y1) = _limits(instance)
    if solution and instance.n + instance.m > 0 and "shift_r" in solution and "a" in solution:
        plan = build_partitions(instance, int(solution["a"]))[int(solution["shift_r"])]
        ox, oy = plan.origin
        for i in range(plan.N + 2):
            ax.axvline(ox + i * plan.a, color="0.5", linestyle="--", linewidth=0.6)
            ax.axhline(oy + i * plan.a, color="0.5", linestyle="--", linewidth=0.6)

    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return ax


def render(instance: Instance, path: Union[str, Path], solution: Optional[dict] = None) -> None:
    with matplotlib.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        draw(instance, solution, ax)
        if solution:
            ax.set_title(
                f"{len(solution['selected_squares'])} squares, {len(solution['covered_points'])} points covered"
            )
        fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
        plt.close(fig)
