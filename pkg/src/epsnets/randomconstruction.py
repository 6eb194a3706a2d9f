"""Staged random point sets and dyadic rectangle ranges.

Point ``i`` (0-based) has y-coordinate (i + 1/2)/n, so indices are already in
y-order, and an x-coordinate whose binary digits are drawn one stage at a
time. At stage t the points are grouped by their first t-1 digits, each group
is cut into index intervals holding exactly r points outside a fixed set I,
and an interval *fails* when its non-I points all draw 0 and its I points all
draw 1. A failure leaves a dyadic rectangle with r points that avoids I.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .construction import Rect
from .rangespace import RangeSpace, from_incidences


class Lemma31Violation(AssertionError):
    pass


@dataclass(frozen=True)
class StagedPointSet:
    digits: np.ndarray  # shape (n, T), entries 0/1; digits[i, t-1] is the stage-t digit

    @property
    def n(self) -> int:
        return self.digits.shape[0]

    @property
    def T(self) -> int:
        return self.digits.shape[1]

    def prefix(self, i: int, t: int) -> int:
        """First t-1 digits of point i read as an integer."""
        key = 0
        for s in range(t - 1):
            key = 2 * key + int(self.digits[i, s])
        return key

    def x(self, i: int) -> Fraction:
        # midpoint of the finest dyadic cell, so no point sits on a grid line
        return truncation(self, i, self.T + 1) + Fraction(1, 2 ** (self.T + 1))

    def y(self, i: int) -> Fraction:
        return Fraction(2 * i + 1, 2 * self.n)

    def point(self, i: int) -> tuple[Fraction, Fraction]:
        return (self.x(i), self.y(i))

    def with_stage_digits(self, t: int, assignment: dict[int, int]) -> "StagedPointSet":
        digits = self.digits.copy()
        for i, bit in assignment.items():
            digits[i, t - 1] = bit
        return StagedPointSet(digits)

    def to_dict(self) -> dict:
        return {"n": self.n, "T": self.T, "digits": ["".join(map(str, row)) for row in self.digits.tolist()]}

    @classmethod
    def from_dict(cls, data: dict) -> "StagedPointSet":
        rows = [[int(ch) for ch in row] for row in data["digits"]]
        digits = np.array(rows, dtype=np.uint8).reshape(int(data["n"]), int(data["T"]))
        if digits.size and digits.max() > 1:
            raise ValueError("digits must be binary")
        return cls(digits)


def sample_points(n: int, T: int, seed) -> StagedPointSet:
    if n < 2 or T < 1:
        raise ValueError(f"need n >= 2 and T >= 1, got n={n}, T={T}")
    rng = np.random.default_rng(seed)
    return StagedPointSet(rng.integers(0, 2, size=(n, T), dtype=np.uint8))


def truncation(P: StagedPointSet, i: int, t: int) -> Fraction:
    """Binary fraction 0.d1 d2 ... d_{t-1} of point i."""
    if not 1 <= t <= P.T + 1:
        raise ValueError(f"stage {t} outside [1, {P.T + 1}]")
    return Fraction(P.prefix(i, t), 2 ** (t - 1))


def h_partition(P: StagedPointSet, t: int) -> dict[Fraction, tuple[int, ...]]:
    """Indices grouped by their t-th truncation, keys in increasing order."""
    if not 1 <= t <= P.T:
        raise ValueError(f"stage {t} outside [1, {P.T}]")
    parts: dict[int, list[int]] = defaultdict(list)
    for i in range(P.n):
        parts[P.prefix(i, t)].append(i)
    scale = 2 ** (t - 1)
    return {Fraction(k, scale): tuple(parts[k]) for k in sorted(parts)}


@dataclass(frozen=True)
class Interval:
    x: Fraction
    members: tuple[int, ...]
    outside: tuple[int, ...]  # members not in I

    @property
    def lo(self) -> int:
        return self.members[0]

    @property
    def hi(self) -> int:
        return self.members[-1]

    def is_good(self, r: int) -> bool:
        return len(self.members) < 4 * r


def carve_intervals(part: Sequence[int], I: Iterable[int], r: int, x: Fraction = Fraction(0)) -> list[Interval]:
    """Greedy left-to-right cut of a part into intervals with r members outside I."""
    if r < 1:
        raise ValueError("r must be >= 1")
    inside = set(I)
    out = []
    members: list[int] = []
    outside: list[int] = []
    for i in part:
        members.append(i)
        if i not in inside:
            outside.append(i)
            if len(outside) == r:
                out.append(Interval(x, tuple(members), tuple(outside)))
                members, outside = [], []
    return out


@dataclass(frozen=True)
class CarvedStage:
    t: int
    parts: dict[Fraction, tuple[int, ...]]
    intervals: tuple[Interval, ...]
    r: int

    @property
    def good(self) -> list[Interval]:
        return [g for g in self.intervals if g.is_good(self.r)]

    @property
    def bad(self) -> list[Interval]:
        return [g for g in self.intervals if not g.is_good(self.r)]


def carve_stage(P: StagedPointSet, t: int, I: Iterable[int], r: int) -> CarvedStage:
    I = set(I)
    parts = h_partition(P, t)
    intervals = []
    for x, part in parts.items():
        intervals.extend(carve_intervals(part, I, r, x))
    return CarvedStage(t, parts, tuple(intervals), r)


def max_stage(n: int, r: int) -> int:
    """Largest t with t <= log2(n/r) - 1, i.e. 2^(t+1) r <= n (0 if none)."""
    t = 0
    while 2 ** (t + 2) * r <= n:
        t += 1
    return t


@dataclass(frozen=True)
class StageCounts:
    t: int
    parts: int
    total: int
    good: int
    bad: int
    checks: dict[str, bool] | None = field(default=None)

    @property
    def ok(self) -> bool:
        return self.checks is None or all(self.checks.values())


def classify_and_count(stage: CarvedStage, I: Iterable[int], r: int, n: int, t: int | None = None,
                       strict: bool = True) -> StageCounts:
    """Interval counts at one stage, with the counting guarantees checked.

    The guarantees (total > n/4r, bad <= |I|/3r, good > n/12r, at most
    2^(t-1) parts) are only checked when |I| <= n/2 and 2^(t+1) r <= n.
    With ``strict`` a failed check raises :class:`Lemma31Violation`.
    """
    t = stage.t if t is None else t
    size_i = len(set(I))
    good = len(stage.good)
    bad = len(stage.bad)
    total = len(stage.intervals)
    checks = None
    if 2 * size_i <= n and 1 <= t <= max_stage(n, r):
        checks = {
            "parts<=2^(t-1)": len(stage.parts) <= 2 ** (t - 1),
            "total>n/(4r)": total * 4 * r > n,
            "bad<=|I|/(3r)": bad * 3 * r <= size_i,
            "good>n/(12r)": good * 12 * r > n,
            "bad_intervals_hold_3r_of_I": all(len(g.members) - r >= 3 * r for g in stage.bad),
        }
        if strict and not all(checks.values()):
            failed = [k for k, v in checks.items() if not v]
            raise Lemma31Violation(f"stage {t}: {failed}")
    return StageCounts(t, len(stage.parts), total, good, bad, checks)


def _fails(stage_digits, interval: Interval, I: set[int]) -> bool:
    return all(stage_digits[i] == (1 if i in I else 0) for i in interval.members)


def interval_fails(P: StagedPointSet, G: Interval, I: Iterable[int], t: int) -> bool:
    """Stage-t digits are 0 on G outside I and 1 on G inside I."""
    return _fails(P.digits[:, t - 1], G, set(I))


def witness_rectangle(G: Interval, t: int, n: int) -> Rect:
    """[x, x + 2^-t) x [y_first, y_last] for an interval carved at stage t."""
    y_lo = Fraction(2 * G.lo + 1, 2 * n)
    y_hi = Fraction(2 * G.hi + 1, 2 * n)
    if G.lo == G.hi:
        # one-point interval: any height below the next point will do
        y_hi += Fraction(1, 4 * n)
    return Rect(G.x, G.x + Fraction(1, 2**t), y_lo, y_hi, closed=(True, False, True, True))


def points_in(rect: Rect, P: StagedPointSet) -> list[int]:
    return [i for i in range(P.n) if rect.contains(P.point(i))]


def failure_frequency(G: Interval, I: Iterable[int], trials: int, seed) -> tuple[float, float]:
    """Empirical failure rate of G over fresh stage digits, and its exact probability."""
    I = set(I)
    rng = np.random.default_rng(seed)
    members = np.array(G.members)
    draws = rng.integers(0, 2, size=(trials, len(members)), dtype=np.uint8)
    target = np.array([1 if i in I else 0 for i in members], dtype=np.uint8)
    hits = int(np.all(draws == target, axis=1).sum())
    return hits / trials, 2.0 ** -len(members)


def random_subset(n: int, k: int, rng: np.random.Generator) -> set[int]:
    return set(rng.choice(n, size=k, replace=False).tolist())


@dataclass(frozen=True)
class SurvivalReport:
    trials: int
    survived: int
    stages: int
    per_stage_bound: float
    bound: float

    @property
    def frequency(self) -> float:
        return self.survived / self.trials

    @property
    def stderr(self) -> float:
        p = self.frequency
        return math.sqrt(max(p * (1 - p), 1 / self.trials) / self.trials)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "survived": self.survived,
            "frequency": self.frequency,
            "stderr": self.stderr,
            "stages": self.stages,
            "per_stage_bound": self.per_stage_bound,
            "bound": self.bound,
        }


def survival_estimate(n: int, r: int, I: Iterable[int], trials: int, seed) -> SurvivalReport:
    """Fraction of trials in which no good interval fails at any stage t <= log2(n/r) - 1.

    Trial k draws its digits from the substream (seed, k).
    """
    I = set(I)
    stages = max_stage(n, r)
    survived = 0
    for k in range(trials):
        P = sample_points(n, max(stages, 1), [seed, k])
        alive = True
        for t in range(1, stages + 1):
            stage = carve_stage(P, t, I, r)
            col = P.digits[:, t - 1]
            if any(_fails(col, g, I) for g in stage.good):
                alive = False
                break
        survived += alive
    per_stage = (1 - 2.0 ** (-4 * r)) ** (n / (12 * r))
    return SurvivalReport(trials, survived, stages, per_stage, per_stage**stages)


def _columns(P: StagedPointSet, t: int) -> dict[int, list[int]]:
    cols: dict[int, list[int]] = defaultdict(list)
    for i in range(P.n):
        cols[P.prefix(i, t + 1)].append(i)
    return cols


def dyadic_canonical_ranges(P: StagedPointSet, m: int) -> RangeSpace:
    """Windows of m y-consecutive points inside each dyadic column, levels 0..T.

    Every dyadic rectangle with at least m points contains such a window, so
    hitting all windows is the same as hitting every heavy dyadic rectangle.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if len(_columns(P, P.T)) != P.n:
        raise ValueError("x-values collide at the finest level; increase T")
    ranges = []
    for t in range(P.T + 1):
        for members in _columns(P, t).values():
            for s in range(len(members) - m + 1):
                ranges.append(members[s:s + m])
    return from_incidences(P.n, ranges)


def dyadic_ranges_bruteforce(P: StagedPointSet, m: int = 1, extra_levels: int = 1) -> RangeSpace:
    """All point sets cut out by [j/2^t, (j+1)/2^t) x [a, b] with >= m points.

    Uses exact rectangle membership; columns are found from each point's x by
    flooring, and y-ranges span every pair of point heights.
    """
    pts = [P.point(i) for i in range(P.n)]
    ys = sorted({p[1] for p in pts})
    found = set()
    for t in range(P.T + 1 + extra_levels):
        scale = 2**t
        for j in sorted({math.floor(p[0] * scale) for p in pts}):
            col = [i for i, p in enumerate(pts) if Fraction(j, scale) <= p[0] < Fraction(j + 1, scale)]
            for a_idx, a in enumerate(ys):
                for b in ys[a_idx:]:
                    # a single height still needs a < b; pad below the next height
                    top = b if b > a else a + Fraction(1, 4 * P.n)
                    rect = Rect(Fraction(j, scale), Fraction(j + 1, scale), a, top,
                                closed=(True, False, True, True))
                    inside = tuple(i for i in col if rect.contains(pts[i]))
                    if len(inside) >= m:
                        found.add(inside)
    return from_incidences(P.n, found)


def distinct_points(n: int, T: int, seed, max_tries: int = 100) -> StagedPointSet:
    """Sample until all x-values differ at resolution 2^-T; retry k uses substream (seed, k)."""
    for attempt in range(max_tries):
        P = sample_points(n, T, seed if attempt == 0 else [seed, attempt])
        if len(_columns(P, T)) == n:
            return P
    raise RuntimeError(f"no collision-free sample after {max_tries} draws")


def r_schedule(n: int) -> int:
    """ceil(log2(log2 n) / 5), the asymptotic choice of r."""
    return max(1, math.ceil(math.log2(math.log2(n)) / 5))


def theorem4_instance(n: int, r: int, seed) -> tuple[StagedPointSet, RangeSpace]:
    """Point set with T = 2 ceil(log2 n) and its windows of size r (use eps = r/n)."""
    if n < 4:
        raise ValueError("n must be >= 4")
    T = 2 * math.ceil(math.log2(n))
    P = distinct_points(n, T, seed)
    return P, dyadic_canonical_ranges(P, r)


def forced_failure(P: StagedPointSet, t: int, G: Interval, I: Iterable[int]) -> StagedPointSet:
    """Copy of P whose stage-t digits make G fail."""
    I = set(I)
    return P.with_stage_digits(t, {i: (1 if i in I else 0) for i in G.members})


def lemma31_report(n: int, r: int, i_size: int, trials: int, seed: int, seeds: int = 100,
                   survival_trials: int | None = None) -> dict:
    """Run the staged-construction checks and collect the outcomes in a JSON-ready dict.

    Over ``seeds`` random (point set, I) pairs every stage is carved and its
    counting guarantees checked; forced failures are planted in good intervals
    and their witness rectangles evaluated exactly; one good interval of each
    size seen is used for a failure-frequency test over ``trials`` draws; and
    the survival frequency is compared with the analytic bound.
    """
    rng = np.random.default_rng(seed)
    stages = max_stage(n, r)
    T = max(stages, 1)
    count_rows = []
    counts_ok = True
    witness_checked = 0
    witness_ok = True
    by_size: dict[int, tuple[Interval, set[int]]] = {}
    for s in range(seeds):
        P = sample_points(n, T, [seed, 0, s])
        I = random_subset(n, i_size, rng)
        for t in range(1, stages + 1):
            stage = carve_stage(P, t, I, r)
            counts = classify_and_count(stage, I, r, n, t, strict=False)
            counts_ok &= counts.ok
            if s == 0:
                count_rows.append({"t": t, "parts": counts.parts, "total": counts.total,
                                   "good": counts.good, "bad": counts.bad, "checks": counts.checks})
            planted = stage.good if s < 5 else stage.good[:2]
            for G in planted:
                by_size.setdefault(len(G.members), (G, I))
                forced = forced_failure(P, t, G, I)
                hit = set(points_in(witness_rectangle(G, t, n), forced))
                witness_checked += 1
                if not interval_fails(forced, G, I, t) or hit != set(G.outside) or hit & I:
                    witness_ok = False
    report = {
        "n": n, "r": r, "i_size": i_size, "seeds": seeds, "stages": stages,
        "counts_ok": counts_ok, "witness_ok": witness_ok, "witnesses_checked": witness_checked,
        "stage_counts_seed0": count_rows,
    }
    ok = counts_ok and witness_ok
    freq_rows = []
    for size in sorted(by_size):
        G, I = by_size[size]
        freq, p = failure_frequency(G, I, trials, [seed, 1, size])
        sigma = math.sqrt(p * (1 - p) / trials)
        within = abs(freq - p) <= 3 * sigma
        freq_rows.append({"size": size, "observed": freq, "expected": p, "sigma": sigma,
                          "within_3sigma": within})
        ok &= within
    report["failure_frequency"] = freq_rows
    surv = survival_estimate(n, r, random_subset(n, i_size, rng), survival_trials or trials, seed)
    surv_ok = surv.frequency <= surv.bound + 3 * surv.stderr
    report["survival"] = {**surv.to_dict(), "below_bound": surv_ok}
    ok &= surv_ok
    report["ok"] = bool(ok)
    return report
