"""Grid-aligned rectangle families R(c, d) and their dual range spaces.

A member ``R^k_{u,v}`` is the open rectangle
``(u/, u/ + c^-k) x (v/, v/ + c^(k-d))`` where ``u`` has ``k`` base-c digits,
``v`` has ``d-k`` digits, ``u/`` is the c-ary fraction of ``u`` and the last
digits agree (an empty string contributes the digit 0). All coordinates are
``fractions.Fraction`` so open/closed membership is decided exactly.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .rangespace import RangeSpace, from_incidences

Point = tuple[Fraction, Fraction]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class DigitString:
    base: int
    digits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.base < 2:
            raise ConstructionError(f"base must be >= 2, got {self.base}")
        if any(not 0 <= x < self.base for x in self.digits):
            raise ConstructionError(f"digits {self.digits} out of range for base {self.base}")

    @classmethod
    def parse(cls, text: str, base: int) -> "DigitString":
        return cls(base, tuple(int(ch, base) for ch in text))

    def __len__(self) -> int:
        return len(self.digits)

    def last(self) -> int:
        """Last digit, with the convention that the empty string ends in 0."""
        return self.digits[-1] if self.digits else 0

    def value(self) -> Fraction:
        return eval_fraction(self)

    def __str__(self) -> str:
        return "".join(str(x) if x < 10 else f"[{x}]" for x in self.digits) or "θ"


def eval_fraction(x: DigitString) -> Fraction:
    total = Fraction(0)
    scale = Fraction(1)
    for digit in x.digits:
        scale /= x.base
        total += digit * scale
    return total


@dataclass(frozen=True)
class Rect:
    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction
    # closed flags for the left, right, bottom and top sides
    closed: tuple[bool, bool, bool, bool] = (False, False, False, False)
    tag: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ConstructionError(f"degenerate rectangle {self}")

    @property
    def is_open(self) -> bool:
        return not any(self.closed)

    def contains(self, p: Sequence[Fraction]) -> bool:
        x, y = p
        left, right, bottom, top = self.closed
        return (
            (self.x_lo <= x if left else self.x_lo < x)
            and (x <= self.x_hi if right else x < self.x_hi)
            and (self.y_lo <= y if bottom else self.y_lo < y)
            and (y <= self.y_hi if top else y < self.y_hi)
        )

    def area(self) -> Fraction:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)

    def corners(self) -> list[Point]:
        return [(x, y) for x in (self.x_lo, self.x_hi) for y in (self.y_lo, self.y_hi)]

    def translated(self, offset: Fraction, closed: bool | None = None) -> "Rect":
        flags = self.closed if closed is None else (closed,) * 4
        return Rect(self.x_lo + offset, self.x_hi + offset, self.y_lo + offset, self.y_hi + offset, flags, self.tag)


def _digits(x, base: int) -> DigitString:
    if isinstance(x, DigitString):
        if x.base != base:
            raise ConstructionError(f"digit string base {x.base} does not match c={base}")
        return x
    if isinstance(x, str):
        return DigitString.parse(x, base)
    return DigitString(base, tuple(x))


def build_rect(k: int, u, v, c: int, d: int) -> Rect:
    if not 0 <= k <= d:
        raise ConstructionError(f"level k={k} outside [0, {d}]")
    u = _digits(u, c)
    v = _digits(v, c)
    if len(u) != k or len(v) != d - k:
        raise ConstructionError(f"expected |u|={k} and |v|={d - k}, got {len(u)} and {len(v)}")
    ub, vb = u.value(), v.value()
    return Rect(
        ub, ub + Fraction(1, c**k), vb, vb + Fraction(1, c ** (d - k)),
        tag=(k, u.digits, v.digits),
    )


@dataclass(frozen=True)
class Family:
    """Rectangle family built from R(c, d), possibly with each member replaced by a chain."""

    c: int
    d: int
    rects: tuple[Rect, ...]
    blowup: int = 1

    def __len__(self) -> int:
        return len(self.rects)

    @property
    def grid(self) -> int:
        return self.c**self.d

    @cached_property
    def _dual_table(self) -> dict[tuple[int, ...], int]:
        grid = witness_grid(self)
        return grid_dual_ranges(self.rects, grid.xs, grid.ys)


def build_family(c: int, d: int) -> Family:
    if c < 2 or d < 1:
        raise ConstructionError(f"need c >= 2 and d >= 1, got c={c}, d={d}")
    rects = []
    for k in range(d + 1):
        for u in product(range(c), repeat=k):
            for v in product(range(c), repeat=d - k):
                last_u = u[-1] if u else 0
                last_v = v[-1] if v else 0
                if last_u == last_v:
                    rects.append(build_rect(k, u, v, c, d))
    return Family(c, d, tuple(rects))


def sibling_groups(f: Family) -> list[list[int]]:
    """Groups of c siblings among levels 1..d-1 (equal up to the shared last digit)."""
    if f.blowup != 1:
        raise ConstructionError("sibling groups are defined on the unblown family")
    groups: dict[tuple, list[int]] = defaultdict(list)
    for idx, rect in enumerate(f.rects):
        k, u, v = rect.tag[:3]
        if 0 < k < f.d:
            groups[(k, u[:-1], v[:-1])].append(idx)
    return [groups[key] for key in sorted(groups)]


def precedes(a: Rect, b: Rect) -> bool:
    """a ≺ b: x-projection of a inside that of b, y-projection of a containing that of b."""
    return b.x_lo <= a.x_lo and a.x_hi <= b.x_hi and a.y_lo <= b.y_lo and b.y_hi <= a.y_hi


class WitnessGrid(NamedTuple):
    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.xs) * len(self.ys)

    def point(self, index: int) -> Point:
        row, col = divmod(index, len(self.xs))
        return (self.xs[col], self.ys[row])

    def points(self) -> list[Point]:
        # row-major: y is the slow index
        return [(x, y) for y in self.ys for x in self.xs]


def witness_grid(f: Family) -> WitnessGrid:
    """Cell centres (2i+1)/(2 c^d) of the base grid, which every member is aligned to."""
    n = f.grid
    centres = tuple(Fraction(2 * i + 1, 2 * n) for i in range(n))
    return WitnessGrid(centres, centres)


def witness_points(f: Family) -> list[Point]:
    return witness_grid(f).points()


def arrangement_grid(rects: Sequence[Rect]) -> WitnessGrid:
    """Every face of the arrangement: all distinct coordinates and midpoints between them."""
    def axis(values):
        vals = sorted(set(values))
        out = []
        for a, b in zip(vals, vals[1:]):
            out.extend((a, (a + b) / 2))
        if vals:
            out.append(vals[-1])
        return tuple(out)

    xs = axis([v for r in rects for v in (r.x_lo, r.x_hi)])
    ys = axis([v for r in rects for v in (r.y_lo, r.y_hi)])
    return WitnessGrid(xs, ys)


def _index_span(values: Sequence[Fraction], lo: Fraction, hi: Fraction, lo_closed: bool, hi_closed: bool) -> tuple[int, int]:
    start = bisect_left(values, lo) if lo_closed else bisect_right(values, lo)
    stop = bisect_right(values, hi) if hi_closed else bisect_left(values, hi)
    return start, max(start, stop)


def grid_incidences(rects: Sequence[Rect], xs: Sequence[Fraction], ys: Sequence[Fraction]) -> tuple[np.ndarray, np.ndarray]:
    """(cell, rect) incidence pairs over a product grid, cells in row-major order.

    Each rectangle covers a sub-block of the grid, located exactly by bisection.
    """
    nx = len(xs)
    cells, owners = [], []
    for j, r in enumerate(rects):
        left, right, bottom, top = r.closed
        x0, x1 = _index_span(xs, r.x_lo, r.x_hi, left, right)
        y0, y1 = _index_span(ys, r.y_lo, r.y_hi, bottom, top)
        if x0 == x1 or y0 == y1:
            continue
        block = (np.arange(y0, y1, dtype=np.int64)[:, None] * nx + np.arange(x0, x1, dtype=np.int64)[None, :]).ravel()
        cells.append(block)
        owners.append(np.full(block.size, j, dtype=np.int64))
    if not cells:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(cells), np.concatenate(owners)


def grid_dual_ranges(rects: Sequence[Rect], xs: Sequence[Fraction], ys: Sequence[Fraction]) -> dict[tuple[int, ...], int]:
    """Distinct dual ranges over a product grid, each mapped to its first witness cell."""
    ncells = len(xs) * len(ys)
    cells, owners = grid_incidences(rects, xs, ys)
    depth = np.bincount(cells, minlength=ncells)
    width = int(depth.max()) if ncells else 0
    sig = np.full((ncells, max(width, 1)), -1, dtype=np.int64)
    if cells.size:
        order = np.lexsort((owners, cells))
        cells, owners = cells[order], owners[order]
        starts = np.concatenate(([0], np.cumsum(depth)[:-1]))
        pos = np.arange(cells.size) - starts[cells]
        sig[cells, pos] = owners
    rows, first = np.unique(sig, axis=0, return_index=True)
    table = {}
    for row, cell in sorted(zip(rows.tolist(), first.tolist()), key=lambda rc: rc[1]):
        table[tuple(x for x in row if x >= 0)] = cell
    return table


def dual_space(f: Family, grid: WitnessGrid | None = None) -> RangeSpace:
    """Dual range space: ground = rectangles, ranges = {R : x in R} over the witnesses."""
    if grid is None:
        table = f._dual_table
    else:
        table = grid_dual_ranges(f.rects, grid.xs, grid.ys)
    return from_incidences(len(f.rects), table.keys(), [r.tag for r in f.rects])


def primal_space(f: Family, grid: WitnessGrid | None = None) -> RangeSpace:
    """Primal space over witness points: one range per rectangle.

    Witnesses with equal dual ranges are interchangeable, so the ground set is
    one representative witness per distinct dual range.
    """
    if grid is None:
        grid = witness_grid(f)
        table = f._dual_table
    else:
        table = grid_dual_ranges(f.rects, grid.xs, grid.ys)
    members: list[list[int]] = [[] for _ in f.rects]
    labels = []
    for i, (sig, cell) in enumerate(table.items()):
        labels.append(grid.point(cell))
        for j in sig:
            members[j].append(i)
    return from_incidences(len(labels), members, labels)


def max_independent_bound(c: int, d: int, r: int) -> Fraction:
    """Upper bound (r-1) (c-1)/(c-2) c^(d-1) on r-independent subfamilies of R(c, d)."""
    if c <= 2:
        raise ConstructionError("the independence bound needs c >= 3")
    if d < 1 or r < 2:
        raise ConstructionError(f"need d >= 1 and r >= 2, got d={d}, r={r}")
    return (r - 1) * Fraction(c - 1, c - 2) * c ** (d - 1)


class IndependenceVerdict(NamedTuple):
    ok: bool
    witness: Point | None = None
    range: tuple[int, ...] | None = None


def is_r_independent(f: Family, subset: Iterable[int], r: int, exact_size: bool = False) -> IndependenceVerdict:
    """True iff no witness x has R_x inside ``subset`` with |R_x| >= r.

    With ``exact_size`` the test only looks at ranges of size exactly r.
    """
    chosen = set(subset)
    if any(not 0 <= i < len(f) for i in chosen):
        raise ConstructionError("subset has indices outside the family")
    grid = witness_grid(f)
    for rng, cell in f._dual_table.items():
        size_ok = len(rng) == r if exact_size else len(rng) >= r
        if size_ok and chosen.issuperset(rng):
            return IndependenceVerdict(False, grid.point(cell), rng)
    return IndependenceVerdict(True)


def bad_rectangles(f: Family, subset: Iterable[int]) -> set[int]:
    chosen = set(subset)
    bad = set()
    for group in sibling_groups(f):
        for idx in group:
            if idx not in chosen and all(o in chosen for o in group if o != idx):
                bad.add(idx)
    return bad


def verify_inequality_x(f: Family, subset: Iterable[int], r: int) -> bool:
    """Check |I| <= (r-1)|B| + (r-1) c^(d-1) for an r-independent I."""
    chosen = set(subset)
    if not is_r_independent(f, chosen, r).ok:
        raise ConstructionError("subset is not r-independent")
    bad = bad_rectangles(f, chosen)
    return len(chosen) <= (r - 1) * len(bad) + (r - 1) * f.c ** (f.d - 1)


def theorem1_parameters(eps) -> tuple[int, int, int]:
    """(r, c, d) with r = ceil(log2(1/eps) / 6), c = 4, d = 3r - 4.

    The ceiling is computed exactly: r is the least integer with 2^(6r) * eps >= 1.
    """
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 64):
        raise ConstructionError(f"eps must lie in (0, 1/64), got {eps}")
    r = 1
    while eps * 2 ** (6 * r) < 1:
        r += 1
    c, d = 4, 3 * r - 4
    assert r >= 2
    assert eps * (d + 1) * c ** (d - 1) < r
    return r, c, d


def eps_for_r(r: int) -> Fraction:
    """Largest power-of-two eps whose parameter schedule yields this r."""
    if r < 2:
        raise ConstructionError("r must be >= 2")
    return Fraction(1, 2 ** (6 * r - 5))


def chain_blowup(f: Family, t: int) -> Family:
    """Replace each member (a,b) x (e,f) by the chain R_1 ≺ ... ≺ R_t.

    R_i = (a + (t-i)δ, b - (t-i)δ) x (e + (i-1)δ, f - (i-1)δ) with
    δ = c^-d / (4t). Every R_i keeps all base cell centres of R, so depth at
    a base witness is multiplied by t.
    """
    if t < 1:
        raise ConstructionError("chain length t must be >= 1")
    if f.blowup != 1:
        raise ConstructionError("family is already blown up")
    delta = Fraction(1, f.grid * 4 * t)
    rects = []
    for rect in f.rects:
        for i in range(1, t + 1):
            sx, sy = (t - i) * delta, (i - 1) * delta
            rects.append(Rect(
                rect.x_lo + sx, rect.x_hi - sx, rect.y_lo + sy, rect.y_hi - sy,
                rect.closed, tag=(*rect.tag, i),
            ))
    return Family(f.c, f.d, tuple(rects), blowup=t)
