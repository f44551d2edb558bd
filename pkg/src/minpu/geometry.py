"""Exact geometric model: points, open unit squares, lattice ownership, genericity.

All coordinates are :class:`fractions.Fraction`; nothing in this module touches
floating point.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


class NotGeneric(ValueError):
    pass


class GenericityError(ValueError):
    """Raised by solvers when handed an instance that fails :func:`check_genericity`."""

    def __init__(self, report: "GenericityReport"):
        self.report = report
        lines = [f"{kind} {list(idx)}" for kind, idx in report.violations]
        super().__init__("instance is not in generic position: " + "; ".join(lines))


class PerturbationFailed(RuntimeError):
    pass


def parse_coord(token) -> Fraction:
    """Parse a decimal string into an exact Fraction; ints are accepted too."""
    if isinstance(token, bool):
        raise ValueError(f"not a decimal coordinate: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, Fraction):
        return token
    if not isinstance(token, str) or not _DECIMAL.match(token.strip()):
        raise ValueError(f"not a decimal coordinate: {token!r}")
    return Fraction(token.strip())


def format_coord(value: Fraction) -> str:
    """Render a Fraction as a terminating decimal string when possible.

    Non-terminating values fall back to ``"p/q"``, which :func:`parse_coord`
    rejects on purpose: instance files carry decimals only.
    """
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = value * 10**digits
    assert scaled.denominator == 1
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


@dataclass(frozen=True, order=True)
class GridPoint:
    gx: int
    gy: int


@dataclass(frozen=True)
class UnitSquare:
    """Open square ``(lx, lx+1) x (ly, ly+1)`` identified by its index."""

    id: int
    lx: Fraction
    ly: Fraction

    @property
    def x(self) -> Fraction:
        """Right boundary."""
        return self.lx + 1

    @property
    def y(self) -> Fraction:
        """Upper boundary."""
        return self.ly + 1


@dataclass(frozen=True)
class Instance:
    points: tuple[Point, ...] = ()
    squares: tuple[UnitSquare, ...] = ()

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.squares)

    @classmethod
    def from_coords(cls, points: Iterable[Sequence] = (), squares: Iterable[Sequence] = ()) -> "Instance":
        pts = tuple((parse_coord(px), parse_coord(py)) for px, py in points)
        sqs = tuple(
            UnitSquare(i, parse_coord(lx), parse_coord(ly)) for i, (lx, ly) in enumerate(squares)
        )
        return cls(pts, sqs)

    def to_dict(self) -> dict:
        return {
            "points": [[format_coord(x), format_coord(y)] for x, y in self.points],
            "squares": [[format_coord(s.lx), format_coord(s.ly)] for s in self.squares],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        if not isinstance(data, dict):
            raise ValueError("instance must be an object with 'points' and 'squares'")
        unknown = set(data) - {"points", "squares"}
        if unknown:
            raise ValueError(f"unexpected instance keys: {sorted(unknown)}")
        for key in ("points", "squares"):
            for pair in data.get(key, []):
                if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    raise ValueError(f"{key} entries must be [x, y] pairs, got {pair!r}")
                for tok in pair:
                    if not isinstance(tok, str):
                        raise ValueError(f"coordinates must be decimal strings, got {tok!r}")
        return cls.from_coords(data.get("points", []), data.get("squares", []))

    @property
    def masks(self) -> tuple[int, ...]:
        """Per-square bitmask over point indices (bit i set iff point i inside)."""
        cached = self.__dict__.get("_masks")
        if cached is None:
            cached = tuple(
                sum(1 << i for i, p in enumerate(self.points) if contains(s, p)) for s in self.squares
            )
            object.__setattr__(self, "_masks", cached)
        return cached


def grid_point_of(square: UnitSquare) -> GridPoint:
    if square.lx.denominator == 1 or square.ly.denominator == 1:
        raise NotGeneric(f"square {square.id} has an integer corner coordinate")
    return GridPoint(math.ceil(square.lx), math.ceil(square.ly))


def x_offset(square: UnitSquare) -> Fraction:
    """Right boundary minus the owning grid point's x, in (0, 1)."""
    return square.lx - math.floor(square.lx)


def contains(square: UnitSquare, point: Point) -> bool:
    px, py = point
    return square.lx < px < square.lx + 1 and square.ly < py < square.ly + 1


def covered_points(square_ids: Iterable[int], instance: Instance) -> set[int]:
    mask = 0
    masks = instance.masks
    for i in square_ids:
        if not 0 <= i < instance.m:
            raise IndexError(f"square index {i} out of range 0..{instance.m - 1}")
        mask |= masks[i]
    return mask_to_set(mask)


def mask_to_set(mask: int) -> set[int]:
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``[x0, x1] x [y0, y1]``."""

    x0: Fraction
    y0: Fraction
    x1: Fraction
    y1: Fraction

    def contains_half_open(self, point: Point) -> bool:
        px, py = point
        return self.x0 <= px < self.x1 and self.y0 <= py < self.y1


def squares_intersecting_block(instance: Instance, block: Box) -> set[int]:
    # open square vs closed box: strict on the square side
    return {
        s.id
        for s in instance.squares
        if s.lx < block.x1 and s.lx + 1 > block.x0 and s.ly < block.y1 and s.ly + 1 > block.y0
    }


# -- genericity ---------------------------------------------------------------

POINT_ON_BOUNDARY = "PointOnBoundary"
INTEGER_SQUARE_COORDINATE = "IntegerSquareCoordinate"
DUPLICATE_SQUARE_X_FRACTION = "DuplicateSquareXFraction"
DUPLICATE_SQUARE_Y_FRACTION = "DuplicateSquareYFraction"
DUPLICATE_SQUARE_X = "DuplicateSquareX"
DUPLICATE_SQUARE_Y = "DuplicateSquareY"


@dataclass(frozen=True)
class GenericityReport:
    violations: tuple[tuple[str, tuple[int, ...]], ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {kind for kind, _ in self.violations}


def _frac(v: Fraction) -> Fraction:
    return v - math.floor(v)


def _on_boundary(square: UnitSquare, point: Point) -> bool:
    px, py = point
    inside_x = square.lx <= px <= square.lx + 1
    inside_y = square.ly <= py <= square.ly + 1
    on_vertical = px in (square.lx, square.lx + 1) and inside_y
    on_horizontal = py in (square.ly, square.ly + 1) and inside_x
    return on_vertical or on_horizontal


def check_genericity(instance: Instance) -> GenericityReport:
    violations: list[tuple[str, tuple[int, ...]]] = []
    squares = instance.squares
    for s in squares:
        if s.lx.denominator == 1 or s.ly.denominator == 1:
            violations.append((INTEGER_SQUARE_COORDINATE, (s.id,)))
    for axis, dup, dup_frac in (
        ("lx", DUPLICATE_SQUARE_X, DUPLICATE_SQUARE_X_FRACTION),
        ("ly", DUPLICATE_SQUARE_Y, DUPLICATE_SQUARE_Y_FRACTION),
    ):
        for i in range(len(squares)):
            vi = getattr(squares[i], axis)
            for j in range(i + 1, len(squares)):
                vj = getattr(squares[j], axis)
                if vi == vj:
                    violations.append((dup, (i, j)))
                elif _frac(vi) == _frac(vj):
                    violations.append((dup_frac, (i, j)))
    for s in squares:
        for pi, p in enumerate(instance.points):
            if _on_boundary(s, p):
                violations.append((POINT_ON_BOUNDARY, (pi, s.id)))
    return GenericityReport(tuple(violations))


def require_generic(instance: Instance) -> None:
    report = check_genericity(instance)
    if not report.ok:
        raise GenericityError(report)


def _min_gap(values: Iterable[Fraction]) -> Fraction:
    vals = sorted(set(values))
    gaps = [b - a for a, b in zip(vals, vals[1:]) if b != a]
    return min(gaps) if gaps else Fraction(1)


def perturb(instance: Instance, seed: int, retries: int = 64) -> Instance:
    """Jitter only the coordinates named in genericity violations.

    Each jitter is a seed-derived rational of magnitude below half the smallest
    nonzero gap between coordinate values on that axis (integers included, so
    a jittered integer corner never reaches the next lattice line).
    """
    report = check_genericity(instance)
    if report.ok:
        return instance

    # (kind, index, axis) of every coordinate allowed to move
    movable: set[tuple[str, int, int]] = set()
    for kind, idx in report.violations:
        if kind == INTEGER_SQUARE_COORDINATE:
            s = instance.squares[idx[0]]
            if s.lx.denominator == 1:
                movable.add(("s", s.id, 0))
            if s.ly.denominator == 1:
                movable.add(("s", s.id, 1))
        elif kind in (DUPLICATE_SQUARE_X, DUPLICATE_SQUARE_X_FRACTION):
            movable.add(("s", idx[1], 0))
        elif kind in (DUPLICATE_SQUARE_Y, DUPLICATE_SQUARE_Y_FRACTION):
            movable.add(("s", idx[1], 1))
        elif kind == POINT_ON_BOUNDARY:
            movable.add(("p", idx[0], 0))
            movable.add(("p", idx[0], 1))

    gaps = []
    for axis in (0, 1):
        vals: list[Fraction] = []
        for p in instance.points:
            vals.append(p[axis])
        for s in instance.squares:
            v = s.lx if axis == 0 else s.ly
            vals.extend((v, v + 1, Fraction(math.floor(v)), Fraction(math.floor(v) + 1), _frac(v)))
        gaps.append(_min_gap(vals))

    rng = random.Random(seed)
    for _ in range(retries):
        pts = [list(p) for p in instance.points]
        sqs = [[s.lx, s.ly] for s in instance.squares]
        for kind, i, axis in sorted(movable):
            # numerator in [1, 499] over 1000: strictly inside (0, gap/2)
            delta = gaps[axis] * Fraction(rng.randint(1, 499), 1000)
            if rng.random() < 0.5:
                delta = -delta
            target = pts if kind == "p" else sqs
            target[i][axis] += delta
        candidate = Instance(
            tuple((x, y) for x, y in pts),
            tuple(UnitSquare(i, lx, ly) for i, (lx, ly) in enumerate(sqs)),
        )
        if check_genericity(candidate).ok:
            return candidate
    raise PerturbationFailed(f"no jitter resolved all violations after {retries} attempts")
