"""Exact block solver: maximum-weight source-sink paths over sweep configurations.

Every square of a block owns one lattice point ``g``.  For each grid point two
vertical sweep lines one unit apart (``right`` at ``x(g) + x`` and ``left`` at
``x(g) + x - 1``) move right in lockstep.  A configuration stores, per grid
point, the 5-tuple ``(hl, ll, hr, lr; next)``: the highest and lowest selected
squares cut by the left line, the highest and lowest cut by the right line, and
the next square whose right boundary the right line will reach.  ``k_tilde``
counts the distinct points covered so far, charged as the token set changes.

Sweep positions are symbolic: ``JustBefore(s)`` means "an infinitesimal amount
left of square ``s``'s right boundary, relative to its grid point".  Square
offsets ``x(s) - x(g_s)`` are pairwise distinct under the genericity rules, so
positions are ranks into the sorted offsets.

Tokens are plain ints: a square index, or :data:`BEGIN` / :data:`END` for the
virtual beginning and ending squares of the tuple's own grid point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from .geometry import GridPoint, Instance, grid_point_of, x_offset

BEGIN = -1
END = -2

DEFAULT_MAX_STATES = 2_000_000

FiveTuple = tuple[int, int, int, int, int]
HL, LL, HR, LR, NEXT = range(5)
SLOTS = ("hl", "ll", "hr", "lr", "next")


class StateBudgetExceeded(RuntimeError):
    def __init__(self, states: int, cap: int, where: str = ""):
        self.states = states
        self.cap = cap
        self.where = where
        msg = f"state budget exceeded: {states} states > cap {cap}"
        super().__init__(f"{msg} ({where})" if where else msg)


class NotAPath(ValueError):
    pass


# -- sweep positions ----------------------------------------------------------

START = "Start"
FINISH = "Finish"


@dataclass(frozen=True)
class SweepPosition:
    """``Start``, ``Finish`` or ``JustBefore`` a square's right-boundary event."""

    event: str
    square: Optional[int] = None

    def __str__(self) -> str:
        if self.event == "JustBefore":
            return f"JustBefore({self.square})"
        return self.event


POS_START = SweepPosition(START)
POS_FINISH = SweepPosition(FINISH)


def just_before(square: int) -> SweepPosition:
    return SweepPosition("JustBefore", square)


@dataclass(frozen=True)
class Configuration:
    tuples: tuple[FiveTuple, ...]
    k_tilde: int
    pos: SweepPosition

    def real_squares(self) -> frozenset[int]:
        return frozenset(t for tup in self.tuples for t in tup if t >= 0)


# -- block context --------------------------------------------------------------


class BlockContext:
    """Squares of one block grouped by owning grid point, with event ranks.

    ``xrank`` orders squares by ``x(s) - x(g_s)``, the sweep offset at which
    the right line reaches them; ``yval`` is the upper boundary.
    """

    def __init__(
        self,
        instance: Instance,
        square_ids: Iterable[int],
        extra_grid_points: Iterable[GridPoint] = (),
    ):
        self.instance = instance
        self.square_ids = tuple(sorted(set(square_ids)))
        owners: dict[GridPoint, list[int]] = {g: [] for g in extra_grid_points}
        for sid in self.square_ids:
            owners.setdefault(grid_point_of(instance.squares[sid]), []).append(sid)
        self.grid_points: tuple[GridPoint, ...] = tuple(sorted(owners))
        order = sorted(self.square_ids, key=lambda s: x_offset(instance.squares[s]))
        self.xrank = {s: r for r, s in enumerate(order)}
        if len({x_offset(instance.squares[s]) for s in self.square_ids}) != len(self.square_ids):
            raise ValueError("square x offsets must be pairwise distinct")
        self.yval = {s: instance.squares[s].y for s in self.square_ids}
        self.by_grid: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(owners[g], key=self.xrank.__getitem__)) for g in self.grid_points
        )
        self.grid_index = {s: gi for gi, sq in enumerate(self.by_grid) for s in sq}
        masks = instance.masks
        self.mask = {s: masks[s] for s in self.square_ids}
        union = 0
        for s in self.square_ids:
            union |= masks[s]
        self.union_mask = union
        self.n_b = union.bit_count()
        self._tuple_masks: dict[FiveTuple, int] = {}

    # token helpers

    def tuple_mask(self, tup: FiveTuple) -> int:
        m = self._tuple_masks.get(tup)
        if m is None:
            m = 0
            for t in tup:
                if t >= 0:
                    m |= self.mask[t]
            self._tuple_masks[tup] = m
        return m

    def cover_mask(self, tuples: Sequence[FiveTuple]) -> int:
        m = 0
        for tup in tuples:
            m |= self.tuple_mask(tup)
        return m

    def position_of(self, tuples: Sequence[FiveTuple], start: bool) -> SweepPosition:
        nexts = [tup[NEXT] for tup in tuples if tup[NEXT] >= 0]
        if not nexts:
            return POS_FINISH
        if start:
            return POS_START
        return just_before(min(nexts, key=self.xrank.__getitem__))


# -- enumeration of envelope-consistent tuples -------------------------------


def _right_options(ctx: BlockContext, candidates: Sequence[int], his, los):
    """(hr, lr, next) triples: next is the earliest square between lr and hr."""
    y = ctx.yval
    xr = ctx.xrank
    for h in his:
        for lo in los:
            if y[h] < y[lo]:
                continue
            limit = min(xr[h], xr[lo])
            for q in candidates:
                if xr[q] > limit:
                    break
                if y[lo] <= y[q] <= y[h]:
                    yield h, lo, q


def initial_tuples(ctx: BlockContext, gi: int) -> list[FiveTuple]:
    squares = ctx.by_grid[gi]
    out: list[FiveTuple] = [(BEGIN, BEGIN, END, END, END)]
    for h, lo, q in _right_options(ctx, squares, squares, squares):
        out.append((BEGIN, BEGIN, h, lo, q))
    return out


def advance_tuple(ctx: BlockContext, gi: int, tup: FiveTuple) -> list[FiveTuple]:
    """All new tuples for grid point ``gi`` once the right line passes its ``next``.

    The passed square joins the left side, so the left extremes update
    deterministically.  On the right side a token survives unless it is the
    passed square itself; a replaced extreme is any later square strictly
    inside the old range, and the new ``next`` is the earliest square still
    bounded by the right extremes.
    """
    hl, ll, hr, lr, passed = tup
    y = ctx.yval
    xr = ctx.xrank
    hl2 = passed if hl == BEGIN or y[passed] > y[hl] else hl
    ll2 = passed if ll == BEGIN or y[passed] < y[ll] else ll
    if hr == passed and lr == passed:
        return [(hl2, ll2, END, END, END)]
    later = [s for s in ctx.by_grid[gi] if xr[s] > xr[passed]]
    his = [hr] if hr != passed else [s for s in later if y[s] < y[passed]]
    los = [lr] if lr != passed else [s for s in later if y[s] > y[passed]]
    return [(hl2, ll2, h, lo, q) for h, lo, q in _right_options(ctx, later, his, los)]


def initial_configurations(
    ctx: BlockContext, max_states: int = DEFAULT_MAX_STATES
) -> Iterator[tuple[Configuration, int]]:
    options = [initial_tuples(ctx, gi) for gi in range(len(ctx.grid_points))]
    total = 1
    for opts in options:
        total *= len(opts)
    if total > max_states:
        raise StateBudgetExceeded(total, max_states, "initial configurations")
    for combo in product(*options):
        cov = ctx.cover_mask(combo)
        weight = len({t for tup in combo for t in tup if t >= 0})
        yield Configuration(combo, cov.bit_count(), ctx.position_of(combo, True)), weight


def _leading_grid(ctx: BlockContext, tuples: Sequence[FiveTuple]) -> int:
    best = -1
    best_rank = None
    for gi, tup in enumerate(tuples):
        nx = tup[NEXT]
        if nx >= 0 and (best_rank is None or ctx.xrank[nx] < best_rank):
            best, best_rank = gi, ctx.xrank[nx]
    return best


def _step(ctx: BlockContext, tuples: tuple[FiveTuple, ...], k_tilde: int):
    """Yield (new_tuples, new_k_tilde, arc_weight) for every successor."""
    gi = _leading_grid(ctx, tuples)
    if gi < 0:
        return
    old = tuples[gi]
    rest = 0
    for gj, tup in enumerate(tuples):
        if gj != gi:
            rest |= ctx.tuple_mask(tup)
    before = rest | ctx.tuple_mask(old)
    old_real = {t for t in old if t >= 0}
    for new in advance_tuple(ctx, gi, old):
        after = rest | ctx.tuple_mask(new)
        delta = (after & ~before).bit_count()
        weight = len({t for t in new if t >= 0} - old_real)
        yield tuples[:gi] + (new,) + tuples[gi + 1 :], k_tilde + delta, weight


def successors(ctx: BlockContext, u: Configuration) -> list[tuple[Configuration, int]]:
    out = []
    for tuples, k, w in _step(ctx, u.tuples, u.k_tilde):
        out.append((Configuration(tuples, k, ctx.position_of(tuples, False)), w))
    return out


def sink_eligible(u: Configuration, k_b: int) -> bool:
    return (
        u.pos == POS_FINISH
        and u.k_tilde == k_b
        and all(t[HR] == END and t[LR] == END and t[NEXT] == END for t in u.tuples)
    )


# -- longest paths ----------------------------------------------------------------


@dataclass(frozen=True)
class BlockEntry:
    weight: int
    selected: frozenset[int]
    path_length: int
    path: tuple[Configuration, ...] = field(default=(), compare=False, repr=False)


@dataclass
class BlockSolutionTable:
    entries: dict[int, BlockEntry]
    states: int
    n_b: int

    def __getitem__(self, k: int) -> BlockEntry:
        return self.entries[k]

    def get(self, k: int) -> Optional[BlockEntry]:
        return self.entries.get(k)

    def __contains__(self, k: int) -> bool:
        return k in self.entries

    def weights(self) -> dict[int, int]:
        return {k: e.weight for k, e in sorted(self.entries.items())}


def max_weight_paths(
    ctx: BlockContext,
    max_states: int = DEFAULT_MAX_STATES,
    k_max: Optional[int] = None,
    arc_weight_hook=None,
) -> BlockSolutionTable:
    """Longest source-sink paths for every exact budget ``k_b`` in one sweep.

    States are ``(tuples, k_tilde)``; a successor's leading ``next`` is always
    later than its predecessor's, so bucketing states by that rank and
    draining buckets in increasing order is a topological order.
    ``arc_weight_hook(u_tuples, v_tuples, w) -> w`` exists for fault injection.
    """
    xr = ctx.xrank
    finish_rank = len(ctx.square_ids)
    best: dict[tuple, list] = {}  # key -> [weight, parent_key]
    buckets: dict[int, list] = {}

    def rank_of(tuples) -> int:
        gi = _leading_grid(ctx, tuples)
        return finish_rank if gi < 0 else xr[tuples[gi][NEXT]]

    def relax(key, weight, parent):
        rec = best.get(key)
        if rec is None:
            if len(best) >= max_states:
                raise StateBudgetExceeded(len(best) + 1, max_states, "block search")
            best[key] = [weight, parent]
            buckets.setdefault(rank_of(key[0]), []).append(key)
        elif weight > rec[0]:
            rec[0] = weight
            rec[1] = parent

    for u, w in initial_configurations(ctx, max_states):
        if k_max is not None and u.k_tilde > k_max:
            continue
        relax((u.tuples, u.k_tilde), w, None)

    for rank in range(finish_rank):
        for key in buckets.pop(rank, ()):
            weight = best[key][0]
            for tuples, k, w in _step(ctx, key[0], key[1]):
                if k_max is not None and k > k_max:
                    continue
                if arc_weight_hook is not None:
                    w = arc_weight_hook(key[0], tuples, w)
                relax((tuples, k), weight + w, key)

    entries: dict[int, BlockEntry] = {}
    for key in buckets.get(finish_rank, ()):
        weight = best[key][0]
        k = key[1]
        if k in entries and entries[k].weight >= weight:
            continue
        chain = []
        cur = key
        while cur is not None:
            chain.append(cur)
            cur = best[cur][1]
        chain.reverse()
        path = tuple(
            Configuration(t, kt, ctx.position_of(t, i == 0)) for i, (t, kt) in enumerate(chain)
        )
        selected = frozenset(s for c in path for s in c.real_squares())
        entries[k] = BlockEntry(weight, selected, len(path), path)
    return BlockSolutionTable(dict(sorted(entries.items())), len(best), ctx.n_b)


def solve_block(instance: Instance, square_ids: Iterable[int], **kw) -> BlockSolutionTable:
    return max_weight_paths(BlockContext(instance, square_ids), **kw)


# -- literal arc conditions ----------------------------------------------------
#
# The checker below reads the configuration and arc conditions directly, with
# BEGIN at x = -inf, END at x = +inf, and any y-inequality that mentions a
# virtual token treated as satisfied.  It is independent of advance_tuple and
# is what validate_path relies on.


def _x_lt_line(ctx: BlockContext, token: int, pos: SweepPosition) -> bool:
    """x(token) < x(right line) at ``pos`` (relative to the token's grid point)."""
    if token == BEGIN:
        return True
    if token == END:
        return False
    if pos.event == START:
        return False
    if pos.event == FINISH:
        return True
    return ctx.xrank[token] < ctx.xrank[pos.square]


def _line_lt_x(ctx: BlockContext, pos: SweepPosition, token: int) -> bool:
    """x(right line) < x(token)."""
    if token == END:
        return True
    if token == BEGIN:
        return False
    return not _x_lt_line(ctx, token, pos)


def _x_ge(ctx: BlockContext, a: int, b: int) -> bool:
    """x(a) >= x(b) with BEGIN=-inf and END=+inf."""
    if a == b:
        return True
    if a == END or b == BEGIN:
        return True
    if a == BEGIN or b == END:
        return False
    return ctx.xrank[a] >= ctx.xrank[b]


def _y_le(ctx: BlockContext, a: int, b: int) -> bool:
    if a < 0 or b < 0:
        return True
    return ctx.yval[a] <= ctx.yval[b]


def configuration_violations(ctx: BlockContext, u: Configuration) -> list[str]:
    out = []
    if len(u.tuples) != len(ctx.grid_points):
        return [f"expected {len(ctx.grid_points)} tuples, got {len(u.tuples)}"]
    for gi, tup in enumerate(u.tuples):
        g = ctx.grid_points[gi]
        own = set(ctx.by_grid[gi])
        for slot, t in zip(SLOTS, tup):
            if t >= 0 and t not in own:
                out.append(f"{g}: {slot}={t} is not a square of this grid point")
        if out:
            continue
        hl, ll, hr, lr, nx = tup
        if hl == END or ll == END or hr == BEGIN or lr == BEGIN or nx == BEGIN:
            out.append(f"{g}: virtual token in the wrong slot")
        if not _y_le(ctx, ll, hl):
            out.append(f"{g}: y(hl) < y(ll)")
        if not _y_le(ctx, lr, hr):
            out.append(f"{g}: y(hr) < y(lr)")
        if not (_y_le(ctx, lr, nx) and _y_le(ctx, nx, hr)):
            out.append(f"{g}: next not between lr and hr")
        for slot, t in (("hl", hl), ("ll", ll)):
            if not _x_lt_line(ctx, t, u.pos):
                out.append(f"{g}: {slot} not left of the right sweep line")
        for slot, t in (("hr", hr), ("lr", lr), ("next", nx)):
            if not _line_lt_x(ctx, u.pos, t):
                out.append(f"{g}: {slot} not right of the right sweep line")
    if u.pos.event == "JustBefore":
        if not any(tup[NEXT] == u.pos.square for tup in u.tuples):
            out.append(f"no grid point has next={u.pos.square} at {u.pos}")
    if not 0 <= u.k_tilde <= ctx.n_b:
        out.append(f"k_tilde={u.k_tilde} outside 0..{ctx.n_b}")
    return out


def arc_violations(ctx: BlockContext, u: Configuration, v: Configuration) -> list[str]:
    """Every reason ``(u, v)`` fails to be an arc between configurations."""
    out = [f"u: {m}" for m in configuration_violations(ctx, u)]
    out += [f"v: {m}" for m in configuration_violations(ctx, v)]
    if out:
        return out
    xr = ctx.xrank
    live = sorted(
        (xr[tup[NEXT]], gi) for gi, tup in enumerate(u.tuples) if tup[NEXT] >= 0
    )
    if not live:
        return ["u has no live next square"]
    g1 = live[0][1]
    first = u.tuples[g1][NEXT]
    second = u.tuples[live[1][1]][NEXT] if len(live) > 1 else None
    # (i) step by step
    if v.pos.event == START:
        out.append("(i) v at Start")
    elif v.pos.event == FINISH:
        if second is not None:
            out.append("(i) v jumps to Finish past a second live next")
    else:
        r = xr[v.pos.square]
        if not r > xr[first]:
            out.append("(i) v does not stride over the first next")
        if second is not None and r > xr[second]:
            out.append("(i) v strides over the second next")
    # (ii1) only g' changes
    for gi, (a, b) in enumerate(zip(u.tuples, v.tuples)):
        if gi != g1 and a != b:
            out.append(f"(ii1) tuple changed at {ctx.grid_points[gi]} which is not g'")
    if u.tuples[g1] == v.tuples[g1]:
        out.append("(ii1) tuple at g' unchanged")
    for gi, (a, b) in enumerate(zip(u.tuples, v.tuples)):
        g = ctx.grid_points[gi]
        # (ii2) x monotone, right tokens kept while the line still cuts them
        for c in range(5):
            if not _x_ge(ctx, b[c], a[c]):
                out.append(f"(ii2) x({SLOTS[c]}) decreased at {g}")
        for c in (HR, LR):
            if _line_lt_x(ctx, v.pos, a[c]) and a[c] != b[c]:
                out.append(f"(ii2) {SLOTS[c]} replaced at {g} while still cut by the right line")
        # (ii3) y monotone and sandwich rules
        if not _y_le(ctx, a[HL], b[HL]):
            out.append(f"(ii3) y(hl) decreased at {g}")
        if not _y_le(ctx, b[LL], a[LL]):
            out.append(f"(ii3) y(ll) increased at {g}")
        if not _y_le(ctx, b[HR], a[HR]):
            out.append(f"(ii3) y(hr) increased at {g}")
        if not _y_le(ctx, a[LR], b[LR]):
            out.append(f"(ii3) y(lr) decreased at {g}")
        for c in (HR, LR):
            if _x_lt_line(ctx, a[c], v.pos) and not (
                _y_le(ctx, a[c], b[HL]) and _y_le(ctx, b[LL], a[c])
            ):
                out.append(f"(ii3) passed {SLOTS[c]} not between new hl and ll at {g}")
    a, b = u.tuples[g1], v.tuples[g1]
    if not _x_ge(ctx, b[NEXT], a[NEXT]) or b[NEXT] == a[NEXT]:
        out.append("(ii2) next at g' did not strictly advance")
    if not (_y_le(ctx, a[NEXT], b[HL]) and _y_le(ctx, b[LL], a[NEXT])):
        out.append("(ii3) passed next not between new hl and ll at g'")
    # (iii) point counter
    before = ctx.cover_mask(u.tuples)
    after = ctx.cover_mask(v.tuples)
    expected = u.k_tilde + (after & ~before).bit_count()
    if v.k_tilde != expected:
        out.append(f"(iii) k_tilde {v.k_tilde} != {expected}")
    return out


def is_initial(ctx: BlockContext, u: Configuration) -> bool:
    if configuration_violations(ctx, u):
        return False
    if any(t[HL] != BEGIN or t[LL] != BEGIN for t in u.tuples):
        return False
    if u.pos not in (POS_START, POS_FINISH):
        return False
    if u.pos == POS_FINISH and any(t[NEXT] != END for t in u.tuples):
        return False
    return u.k_tilde == ctx.cover_mask(u.tuples).bit_count()


# -- path validation --------------------------------------------------------------


@dataclass
class PathReport:
    ok: bool
    arc_weights: list[int]
    total_weight: int
    selected: frozenset[int]
    covered: int
    final_k_tilde: int
    violation: Optional[str] = None


def arc_weight(u: Optional[Configuration], v: Optional[Configuration]) -> int:
    if v is None:
        return 0
    before = u.real_squares() if u is not None else frozenset()
    return len(v.real_squares() - before)


def validate_path(ctx: BlockContext, path: Sequence[Configuration]) -> PathReport:
    """Check a source-sink path and its two counting identities.

    Raises :class:`NotAPath` if the source arc, some arc, or the sink arc is
    inadmissible; otherwise reports whether the arc weights add up to the
    number of distinct squares and whether the final counter equals the
    number of distinct covered points.
    """
    if not path:
        raise NotAPath("empty path")
    if not is_initial(ctx, path[0]):
        raise NotAPath(f"first configuration is not a source successor: {path[0]}")
    for i in range(len(path) - 1):
        problems = arc_violations(ctx, path[i], path[i + 1])
        if problems:
            raise NotAPath(f"arc {i}->{i + 1}: {problems[0]}")
    last = path[-1]
    if not sink_eligible(last, last.k_tilde):
        raise NotAPath("last configuration is not linked to the sink")
    weights = [arc_weight(None, path[0])]
    weights += [arc_weight(path[i], path[i + 1]) for i in range(len(path) - 1)]
    weights.append(0)
    selected = frozenset(s for c in path for s in c.real_squares())
    cov = 0
    for s in selected:
        cov |= ctx.mask[s]
    covered = cov.bit_count()
    total = sum(weights)
    violation = None
    if total != len(selected):
        violation = f"arc weights sum to {total} but the path uses {len(selected)} squares"
    elif last.k_tilde != covered:
        violation = f"k_tilde ends at {last.k_tilde} but {covered} points are covered"
    return PathReport(violation is None, weights, total, selected, covered, last.k_tilde, violation)


def random_walk(ctx: BlockContext, rng: random.Random) -> list[Configuration]:
    starts = list(initial_configurations(ctx))
    u = rng.choice(starts)[0]
    path = [u]
    while u.pos != POS_FINISH:
        nxt = successors(ctx, u)
        if not nxt:
            break
        u = rng.choice(nxt)[0]
        path.append(u)
    return path


# -- trace output -------------------------------------------------------------------


def _tok(t: int) -> str:
    return "b" if t == BEGIN else "e" if t == END else f"s{t}"


def format_tuple(tup: FiveTuple) -> str:
    return "({},{},{},{};{})".format(*map(_tok, tup))


def format_trace(ctx: BlockContext, path: Sequence[Configuration]) -> list[str]:
    """One line per arc: ``event grid tuple delta weight``, tab separated.

    The first line is the source arc (grid ``*``, all tuples changed); the
    last is the sink arc.
    """
    lines = []
    prev: Optional[Configuration] = None
    for cfg in path:
        if prev is None:
            changed = "*"
            tup = " ".join(format_tuple(t) for t in cfg.tuples)
            delta = cfg.k_tilde
        else:
            diff = [gi for gi, (a, b) in enumerate(zip(prev.tuples, cfg.tuples)) if a != b]
            changed = ",".join(f"({ctx.grid_points[gi].gx},{ctx.grid_points[gi].gy})" for gi in diff)
            tup = " ".join(format_tuple(cfg.tuples[gi]) for gi in diff)
            delta = cfg.k_tilde - prev.k_tilde
        lines.append(f"{cfg.pos}\t{changed}\t{tup}\t{delta}\t{arc_weight(prev, cfg)}")
        prev = cfg
    if path:
        lines.append(f"Sink\t-\t-\t0\t0")
    return lines
