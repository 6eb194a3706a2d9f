"""Finite range spaces stored as incidence hypergraphs.

Ground elements are the integers ``0..n-1``. Ranges are sorted tuples of
ground indices; construction normalizes and deduplicates them, so two
``RangeSpace`` values with the same ranges compare equal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Callable, Iterable, NamedTuple, Sequence


class RangeSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class RangeSpace:
    n: int
    ranges: tuple[tuple[int, ...], ...]
    labels: tuple[Any, ...] | None = None

    def __len__(self) -> int:
        return len(self.ranges)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Ranges as integer bitmasks (bit i set iff element i is in the range)."""
        return tuple(_to_mask(r) for r in self.ranges)

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """Per ground element, the bitmask of ranges containing it."""
        cols = [0] * self.n
        for j, r in enumerate(self.ranges):
            bit = 1 << j
            for i in r:
                cols[i] |= bit
        return tuple(cols)

    def max_range_size(self) -> int:
        return max((len(r) for r in self.ranges), default=0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ranges": [list(r) for r in self.ranges],
            "labels": None if self.labels is None else [_jsonable(x) for x in self.labels],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RangeSpace":
        try:
            n = int(data["n"])
            ranges = data["ranges"]
        except KeyError as exc:
            raise RangeSpaceError(f"range space is missing field {exc.args[0]!r}") from None
        labels = data.get("labels")
        if labels is not None:
            labels = [_hashable(x) for x in labels]
        return from_incidences(n, ranges, labels)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "RangeSpace":
        return cls.from_dict(json.loads(text))


class NetVerdict(NamedTuple):
    ok: bool
    witness: tuple[int, ...] | None = None


def _to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


def from_incidences(
    n: int,
    ranges: Iterable[Iterable[int]],
    labels: Sequence[Any] | None = None,
) -> RangeSpace:
    """Build a normalized range space.

    Each range is turned into a sorted tuple without repeats, equal ranges
    are merged, and the range list is sorted lexicographically.
    """
    if n < 0:
        raise RangeSpaceError(f"ground size must be nonnegative, got {n}")
    seen = set()
    for r in ranges:
        t = tuple(sorted(set(int(i) for i in r)))
        if t and (t[0] < 0 or t[-1] >= n):
            raise RangeSpaceError(f"range {list(t)} has an index outside [0, {n})")
        seen.add(t)
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise RangeSpaceError(f"expected {n} labels, got {len(labels)}")
    return RangeSpace(n, tuple(sorted(seen)), labels)


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise RangeSpaceError(f"eps must lie in (0, 1], got {eps}")
    return eps


def minimal_ranges(ranges: Iterable[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Inclusion-minimal members of a family of distinct sorted tuples.

    Works by increasing size; a candidate is dropped when some kept range is a
    subset of it, detected by counting hits through a per-element index.
    """
    kept: list[tuple[int, ...]] = []
    index: dict[int, list[int]] = {}
    for r in sorted(set(ranges), key=lambda t: (len(t), t)):
        hits: dict[int, int] = {}
        dominated = False
        for e in r:
            for k in index.get(e, ()):
                h = hits.get(k, 0) + 1
                if h == len(kept[k]):
                    dominated = True
                    break
                hits[k] = h
            if dominated:
                break
        if dominated:
            continue
        k = len(kept)
        kept.append(r)
        for e in r:
            index.setdefault(e, []).append(k)
        if not r:
            # the empty set is a subset of everything
            break
    return sorted(kept)


def ranges_of_size_at_least(rs: RangeSpace, m: int) -> RangeSpace:
    """Inclusion-minimal ranges with at least ``m`` elements (``m >= 1``)."""
    big = [r for r in rs.ranges if len(r) >= max(m, 1)]
    return RangeSpace(rs.n, tuple(minimal_ranges(big)), rs.labels)


def heavy_ranges(rs: RangeSpace, eps) -> RangeSpace:
    """Inclusion-minimal ranges of size >= eps * n, compared exactly.

    Hitting these is equivalent to hitting every heavy range, which is what an
    eps-net must do.
    """
    eps = _check_eps(eps)
    threshold = eps * rs.n
    big = [r for r in rs.ranges if r and len(r) >= threshold]
    return RangeSpace(rs.n, tuple(minimal_ranges(big)), rs.labels)


def is_epsilon_net(rs: RangeSpace, eps, candidate: Iterable[int]) -> NetVerdict:
    eps = _check_eps(eps)
    chosen = set(candidate)
    bad = [i for i in chosen if not 0 <= i < rs.n]
    if bad:
        raise RangeSpaceError(f"candidate contains indices outside the ground set: {sorted(bad)}")
    threshold = eps * rs.n
    for r in rs.ranges:
        if r and len(r) >= threshold and chosen.isdisjoint(r):
            return NetVerdict(False, r)
    return NetVerdict(True, None)


def _dedup_columns(rs: RangeSpace) -> list[int]:
    # two elements with equal columns can never sit in the same shattered set
    # of size >= 2, so one representative per column class suffices
    seen = {}
    for i, col in enumerate(rs.columns):
        seen.setdefault(col, i)
    return sorted(seen.values())


def is_shattered(rs: RangeSpace, subset: Sequence[int]) -> bool:
    """Brute-force shattering test: collect traces range ∩ A."""
    a = set(subset)
    traces = {tuple(i for i in r if i in a) for r in rs.ranges}
    return len(traces) == 2 ** len(a)


def vc_dimension(rs: RangeSpace, cap: int = 8) -> int:
    """Largest k <= cap such that some k-subset of the ground set is shattered.

    Subsets are grown in lexicographic order, and only shattered sets are
    extended. This is exact because every subset of a shattered set is
    shattered, so the prefix of a shattered set is always reached.
    """
    if cap < 0:
        raise RangeSpaceError("cap must be nonnegative")
    if not rs.ranges:
        return 0
    full = (1 << len(rs.ranges)) - 1
    cols = rs.columns
    elements = _dedup_columns(rs)
    best = 0

    # cells[p] = bitmask of ranges whose trace on the current set is pattern p
    def extend(start: int, size: int, cells: list[int]) -> None:
        nonlocal best
        if size > best:
            best = size
        if best >= cap:
            return
        for pos in range(start, len(elements)):
            col = cols[elements[pos]]
            split = []
            ok = True
            for c in cells:
                inside = c & col
                outside = c & ~col
                if not inside or not outside:
                    ok = False
                    break
                split.append(outside)
                split.append(inside)
            if ok:
                extend(pos + 1, size + 1, split)
                if best >= cap:
                    return

    extend(0, 0, [full])
    return min(best, cap)


def vc_dimension_exhaustive(rs: RangeSpace, cap: int | None = None) -> int:
    """Reference implementation: test every subset with :func:`is_shattered`."""
    top = rs.n if cap is None else min(cap, rs.n)
    best = 0
    for k in range(1, top + 1):
        if any(is_shattered(rs, a) for a in combinations(range(rs.n), k)):
            best = k
        else:
            break
    return best


def dualize(points: Sequence[Any], shapes: Sequence[Any], contains: Callable | None = None) -> RangeSpace:
    """Dual range space: ground = shapes, one range per point.

    ``contains(shape, point)`` decides membership; by default ``shape.contains(point)``.
    """
    if contains is None:
        def contains(shape, point):
            return shape.contains(point)
    ranges = [[j for j, s in enumerate(shapes) if contains(s, p)] for p in points]
    return from_incidences(len(shapes), ranges)


def replicate(rs: RangeSpace, t: int) -> RangeSpace:
    """Replace every ground element by ``t`` copies (element i -> i*t .. i*t+t-1)."""
    if t < 1:
        raise RangeSpaceError("replication factor must be >= 1")
    ranges = [[i * t + s for i in r for s in range(t)] for r in rs.ranges]
    labels = None
    if rs.labels is not None:
        labels = [(lab, s) for lab in rs.labels for s in range(t)]
    return from_incidences(rs.n * t, ranges, labels)
