"""Planar rectangles as points in R^4, corner boxes, and half-spaces.

A closed rectangle [x1, x2] x [y1, y2] in the open first quadrant maps to
p(R) = (x1, 1/x2, y1, 1/y2). A query point q = (a, b) lies in R exactly when
p(R) lies in the corner box [0, a] x [0, 1/a] x [0, b] x [0, 1/b]. After a
rank rescaling of each axis, every corner box can be traded for a half-space
through its snapped corner without changing which points it contains.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .construction import Family, Rect, witness_points
from .rangespace import RangeSpace, from_incidences

PointD = tuple[Fraction, ...]


class DualityError(ValueError):
    pass


@dataclass(frozen=True)
class CornerBox:
    """The box [0, b_1] x ... x [0, b_m]."""

    uppers: tuple[Fraction, ...]

    def __post_init__(self):
        if any(b <= 0 for b in self.uppers):
            raise DualityError(f"corner box needs positive uppers, got {self.uppers}")

    @property
    def dim(self) -> int:
        return len(self.uppers)

    def contains(self, p: Sequence[Fraction]) -> bool:
        if len(p) != self.dim:
            raise DualityError(f"point of dimension {len(p)} tested against a {self.dim}-box")
        return all(0 <= x <= b for x, b in zip(p, self.uppers))


@dataclass(frozen=True)
class HalfSpace:
    """sum(coefficients[i] * x_i) <= rhs."""

    coefficients: tuple[Fraction, ...]
    rhs: Fraction

    def __post_init__(self):
        if self.rhs < 0:
            raise DualityError("half-space must contain the origin")

    def contains(self, p: Sequence[Fraction]) -> bool:
        if len(p) != len(self.coefficients):
            raise DualityError("dimension mismatch")
        return sum(a * x for a, x in zip(self.coefficients, p)) <= self.rhs


def rect_to_point4(rect: Rect) -> PointD:
    if not all(rect.closed):
        raise DualityError("rectangle must be closed")
    if min(rect.x_lo, rect.y_lo) <= 0:
        raise DualityError(f"rectangle must lie in the open first quadrant, got {rect}")
    return (rect.x_lo, 1 / rect.x_hi, rect.y_lo, 1 / rect.y_hi)


def query_box(q: Sequence[Fraction]) -> CornerBox:
    a, b = (Fraction(v) for v in q)
    if a <= 0 or b <= 0:
        raise DualityError(f"query point must be positive, got {q}")
    return CornerBox((a, 1 / a, b, 1 / b))


def shift_family(f: Family | Sequence[Rect], offset=1) -> list[Rect]:
    """Translate by (offset, offset) and close every side."""
    offset = Fraction(offset)
    if offset <= 0:
        raise DualityError("offset must be positive")
    rects = f.rects if isinstance(f, Family) else f
    return [r.translated(offset, closed=True) for r in rects]


def box_incidence_space(points: Sequence[PointD], boxes: Sequence[CornerBox]) -> RangeSpace:
    """Ground = points, one range per box (closed membership)."""
    for b in boxes:
        for p in points:
            if len(p) != b.dim:
                raise DualityError(f"point of dimension {len(p)} vs box of dimension {b.dim}")
    ranges = [[i for i, p in enumerate(points) if b.contains(p)] for b in boxes]
    return from_incidences(len(points), ranges)


def halfspace_space(points: Sequence[PointD], halfspaces: Sequence[HalfSpace]) -> RangeSpace:
    ranges = [[i for i, p in enumerate(points) if h.contains(p)] for h in halfspaces]
    return from_incidences(len(points), ranges)


def axis_values(points: Sequence[PointD]) -> list[tuple[Fraction, ...]]:
    """Per axis, the sorted distinct coordinate values."""
    if not points:
        return []
    dim = len(points[0])
    return [tuple(sorted({p[i] for p in points})) for i in range(dim)]


def rescale_for_halfspaces(points: Sequence[PointD], m: int | None = None) -> list[PointD]:
    """Replace the j-th smallest distinct value on each axis by (m+1)^j (j from 1)."""
    if not points:
        return []
    m = len(points[0]) if m is None else m
    if any(x <= 0 for p in points for x in p):
        raise DualityError("rescaling needs strictly positive coordinates")
    ranks = [{v: j for j, v in enumerate(vals, start=1)} for vals in axis_values(points)]
    return [tuple(Fraction((m + 1) ** ranks[i][x]) for i, x in enumerate(p)) for p in points]


def _check_ratios(grid: Sequence[Sequence[Fraction]], m: int) -> None:
    for axis in grid:
        if any(v <= 0 for v in axis):
            raise DualityError("grid values must be positive")
        for lo, hi in zip(axis, axis[1:]):
            if not hi > m * lo:
                raise DualityError(f"consecutive grid values {lo}, {hi} violate ratio > {m}")


def halfspace_from_box(box: CornerBox, grid: Sequence[Sequence[Fraction]], m: int | None = None) -> HalfSpace:
    """Half-space sum x_i / b_i <= m with each b_i snapped down to the grid.

    An axis where no grid value is <= b_i gets b_i = first/(m+1), so its term
    alone already exceeds m at every grid point.
    """
    m = box.dim if m is None else m
    if len(grid) != box.dim:
        raise DualityError("grid dimension does not match the box")
    _check_ratios(grid, m)
    snapped = []
    for b, axis in zip(box.uppers, grid):
        j = bisect_right(axis, b)
        snapped.append(axis[j - 1] if j else axis[0] / (m + 1))
    return HalfSpace(tuple(1 / b for b in snapped), Fraction(m))


def transfer_box(box: CornerBox, original: Sequence[Sequence[Fraction]],
                 rescaled: Sequence[Sequence[Fraction]], m: int | None = None) -> CornerBox:
    """Express a box over original coordinates in rescaled coordinates by rank."""
    m = box.dim if m is None else m
    uppers = []
    for b, orig, new in zip(box.uppers, original, rescaled):
        j = bisect_right(orig, b)
        uppers.append(new[j - 1] if j else new[0] / (m + 1))
    return CornerBox(tuple(uppers))


def theorem2_instance(f: Family) -> tuple[list[PointD], list[CornerBox]]:
    """Points p(R) of the unit-shifted family and boxes B(x) over shifted witnesses."""
    rects = shift_family(f, 1)
    points = [rect_to_point4(r) for r in rects]
    boxes = [query_box((x + 1, y + 1)) for x, y in witness_points(f)]
    return points, boxes


def theorem3_instance(f: Family) -> tuple[list[PointD], list[HalfSpace]]:
    """Rescaled points p(R) in R^4 and one origin half-space per witness."""
    points, boxes = theorem2_instance(f)
    original = axis_values(points)
    scaled = rescale_for_halfspaces(points, 4)
    grid = axis_values(scaled)
    halfspaces = [halfspace_from_box(transfer_box(b, original, grid, 4), grid, 4) for b in boxes]
    return scaled, halfspaces
