"""Minimum hitting sets and eps-nets.

The exact solver is a depth-first branch and bound over bitmask ranges. Its
lower bound is a greedy packing of pairwise-disjoint unhit ranges: every such
range needs its own element, so the packing size never exceeds the optimum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .construction import Family, dual_space
from .rangespace import (
    RangeSpace,
    heavy_ranges,
    is_epsilon_net,
    mask_to_tuple,
    minimal_ranges,
    ranges_of_size_at_least,
    vc_dimension,
)

DEFAULT_BUDGET = 10**7


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    solution: tuple[int, ...]
    size: int
    lower_bound: int
    optimal: bool
    nodes_explored: int = 0
    wall_time: float = 0.0
    # only set for maximization results
    upper_bound: int | None = None

    def to_dict(self) -> dict:
        out = {
            "solution": list(self.solution),
            "size": self.size,
            "lower_bound": self.lower_bound,
            "optimal": self.optimal,
            "nodes_explored": self.nodes_explored,
            "wall_time": self.wall_time,
        }
        if self.upper_bound is not None:
            out["upper_bound"] = self.upper_bound
        return out


def _require_nonempty(rs: RangeSpace) -> None:
    if any(not r for r in rs.ranges):
        raise SolverError("range space contains an empty range; it cannot be hit")


def greedy_hitting_set(rs: RangeSpace) -> tuple[int, ...]:
    """Pick the element hitting most unhit ranges until all are hit (ties: lowest index)."""
    _require_nonempty(rs)
    counts = np.zeros(rs.n, dtype=np.int64)
    by_element: list[list[int]] = [[] for _ in range(rs.n)]
    for j, r in enumerate(rs.ranges):
        for i in r:
            counts[i] += 1
            by_element[i].append(j)
    hit = np.zeros(len(rs.ranges), dtype=bool)
    remaining = len(rs.ranges)
    chosen = []
    while remaining:
        e = int(np.argmax(counts))
        chosen.append(e)
        for j in by_element[e]:
            if not hit[j]:
                hit[j] = True
                remaining -= 1
                for i in rs.ranges[j]:
                    counts[i] -= 1
    return tuple(sorted(chosen))


def _packing_bound(masks: list[int]) -> int:
    used = 0
    count = 0
    for m in sorted(masks, key=int.bit_count):
        if not m & used:
            used |= m
            count += 1
    return count


class _BudgetExhausted(Exception):
    pass


def exact_min_hitting_set(rs: RangeSpace, node_budget: int = DEFAULT_BUDGET) -> OptResult:
    """Branch and bound for a minimum hitting set.

    At each node the unhit range with fewest elements (first one on ties) is
    selected and every element of it is tried in increasing index order;
    elements tried earlier are removed from the later branches. If the budget
    runs out, the greedy-seeded incumbent is returned with ``optimal=False``
    and the root packing bound.
    """
    _require_nonempty(rs)
    start = time.perf_counter()
    masks = [sum(1 << i for i in r) for r in minimal_ranges(rs.ranges)]
    greedy = greedy_hitting_set(rs) if masks else ()
    best = {"size": len(greedy), "solution": greedy}
    root_lb = _packing_bound(masks)
    nodes = 0

    def enter(chosen: int, count: int, unhit: list[int]):
        """Visit a node; return a branching frame or None if it is a leaf or pruned."""
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise _BudgetExhausted
        if not unhit:
            if count < best["size"]:
                best["size"] = count
                best["solution"] = mask_to_tuple(chosen)
            return None
        if count + _packing_bound(unhit) >= best["size"]:
            return None
        pick = min(unhit, key=int.bit_count)
        # frame: chosen, count, unhit, branch elements, next position, banned mask
        return [chosen, count, unhit, mask_to_tuple(pick), 0, 0]

    optimal = True
    try:
        stack = []
        if root_lb < best["size"]:
            frame = enter(0, 0, masks)
            if frame:
                stack.append(frame)
        while stack:
            frame = stack[-1]
            chosen, count, unhit, elems, pos, banned = frame
            if pos == len(elems):
                stack.pop()
                continue
            # re-check: the incumbent may have improved since this frame opened
            if pos and count + 1 >= best["size"]:
                stack.pop()
                continue
            bit = 1 << elems[pos]
            frame[4] = pos + 1
            frame[5] = banned | bit
            rest = []
            for m in unhit:
                if m & bit:
                    continue
                m &= ~banned
                if not m:
                    rest = None
                    break
                rest.append(m)
            if rest is not None:
                child = enter(chosen | bit, count + 1, rest)
                if child:
                    stack.append(child)
    except _BudgetExhausted:
        optimal = False
        nodes = node_budget
    size = best["size"]
    return OptResult(
        solution=tuple(best["solution"]),
        size=size,
        lower_bound=size if optimal else root_lb,
        optimal=optimal,
        nodes_explored=nodes,
        wall_time=time.perf_counter() - start,
    )


def brute_force_min_hitting_set(rs: RangeSpace) -> int:
    """Size of a minimum hitting set by trying subsets in order of size."""
    _require_nonempty(rs)
    masks = [sum(1 << i for i in r) for r in rs.ranges]
    if not masks:
        return 0
    from itertools import combinations

    for k in range(1, rs.n + 1):
        for combo in combinations(range(rs.n), k):
            s = sum(1 << i for i in combo)
            if all(m & s for m in masks):
                return k
    raise SolverError("unreachable: the full ground set hits every nonempty range")


def min_epsilon_net(rs: RangeSpace, eps, node_budget: int = DEFAULT_BUDGET) -> OptResult:
    heavy = heavy_ranges(rs, eps)
    if not heavy.ranges:
        return OptResult((), 0, 0, True)
    return exact_min_hitting_set(heavy, node_budget)


def max_r_independent(f: Family | RangeSpace, r: int, node_budget: int = DEFAULT_BUDGET) -> OptResult:
    """Largest subfamily containing no dual range of size >= r.

    Computed as the complement of a minimum hitting set of the minimal dual
    ranges with at least r elements. ``lower_bound`` is the size achieved and
    ``upper_bound`` the certified maximum.
    """
    if r < 2:
        raise SolverError("r must be >= 2")
    rs = f if isinstance(f, RangeSpace) else dual_space(f)
    targets = ranges_of_size_at_least(rs, r)
    if targets.ranges:
        mhs = exact_min_hitting_set(targets, node_budget)
    else:
        mhs = OptResult((), 0, 0, True)
    hit = set(mhs.solution)
    independent = tuple(i for i in range(rs.n) if i not in hit)
    return OptResult(
        solution=independent,
        size=len(independent),
        lower_bound=len(independent),
        optimal=mhs.optimal,
        nodes_explored=mhs.nodes_explored,
        wall_time=mhs.wall_time,
        upper_bound=rs.n - mhs.lower_bound,
    )


@dataclass(frozen=True)
class SampleNet:
    net: tuple[int, ...]
    attempts: int
    sample_size: int


def hw_sample_size(vc: int, eps) -> int:
    """ceil((8d/eps) log2(8d/eps)), with d clamped to at least 1."""
    q = 8 * max(vc, 1) / Fraction(eps)
    return math.ceil(float(q) * math.log2(q))


def hw_sample_net(rs: RangeSpace, eps, seed: int, vc: int | None = None,
                  max_attempts: int = 10_000) -> SampleNet:
    """Random-sampling eps-net: draw the sample size with replacement until it verifies.

    ``vc`` overrides the VC-dimension otherwise computed with cap 4.
    """
    eps = Fraction(eps)
    rng = np.random.default_rng(seed)
    if not heavy_ranges(rs, eps).ranges:
        return SampleNet((), 1, 0)
    m = hw_sample_size(vc_dimension(rs, 4) if vc is None else vc, eps)
    for attempt in range(1, max_attempts + 1):
        net = tuple(sorted(set(rng.integers(0, rs.n, size=m).tolist())))
        if is_epsilon_net(rs, eps, net).ok:
            return SampleNet(net, attempt, m)
    raise SolverError(f"no verified net after {max_attempts} attempts")


def solve_net(rs: RangeSpace, eps, mode: str = "exact", seed: int | None = None,
              node_budget: int = DEFAULT_BUDGET) -> OptResult:
    """Common front end for the three solving modes."""
    start = time.perf_counter()
    if mode == "exact":
        return min_epsilon_net(rs, eps, node_budget)
    heavy = heavy_ranges(rs, eps)
    lb = _packing_bound([sum(1 << i for i in r) for r in heavy.ranges])
    if mode == "greedy":
        sol = greedy_hitting_set(heavy) if heavy.ranges else ()
    elif mode == "sample":
        if seed is None:
            raise SolverError("sample mode needs an explicit seed")
        sol = hw_sample_net(rs, eps, seed).net
    else:
        raise SolverError(f"unknown mode {mode!r}")
    return OptResult(tuple(sol), len(sol), lb, lb == len(sol), 0, time.perf_counter() - start)


def hits_all(rs: RangeSpace, candidate: Iterable[int]) -> bool:
    chosen = set(candidate)
    return all(not chosen.isdisjoint(r) for r in rs.ranges)
