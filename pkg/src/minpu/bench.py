"""Empirical scaling of the block DP: states explored and time over a size ladder.

Every rung of a ladder reuses one seeded instance and keeps only its first
``m`` squares, so a rung's configuration space contains the previous one's.
"""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass

from .blockdp import DEFAULT_MAX_STATES, BlockContext, max_weight_paths
from .geometry import Instance
from .verify import random_block_instance


@dataclass(frozen=True)
class BenchRow:
    n: int
    m: int
    a: int
    states: int
    time: float

    def line(self) -> str:
        return f"{self.n}\t{self.m}\t{self.a}\t{self.states}\t{self.time:.4f}"


HEADER = "n\tm\ta\tstates\ttime"


def parse_schedule(text: str) -> list[int]:
    """``"4"`` -> [4], ``"2..6"`` -> [2, 3, 4, 5, 6], ``"2,4,7"`` -> [2, 4, 7]."""
    text = text.strip()
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise ValueError(f"empty schedule {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"bad schedule {text!r}; use N, LO..HI or a comma list") from None


def run_ladder(
    ms: list[int], n: int, a: int, seed: int, max_states: int = DEFAULT_MAX_STATES
) -> list[BenchRow]:
    rng = random.Random(seed)
    full = random_block_instance(rng, a, max(ms), n)
    rows = []
    for m in ms:
        inst = Instance(full.points, full.squares[:m])
        ctx = BlockContext(inst, range(m))
        start = time.perf_counter()
        table = max_weight_paths(ctx, max_states=max_states)
        rows.append(BenchRow(n, m, a, table.states, time.perf_counter() - start))
    return rows
