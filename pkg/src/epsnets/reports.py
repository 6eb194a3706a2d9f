"""Growth tables, falsification runs and verification reports.

Every function here is deterministic given its arguments (including the
seed) and returns plain data ready for CSV/JSON output.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .construction import (
    Rect,
    bad_rectangles,
    build_family,
    dual_space,
    eps_for_r,
    is_r_independent,
    max_independent_bound,
    primal_space,
    theorem1_parameters,
)
from .duality import (
    CornerBox,
    axis_values,
    box_incidence_space,
    halfspace_from_box,
    halfspace_space,
    query_box,
    rect_to_point4,
    rescale_for_halfspaces,
    theorem2_instance,
    theorem3_instance,
    transfer_box,
)
from .rangespace import RangeSpace, heavy_ranges, is_epsilon_net, vc_dimension
from .solver import (
    DEFAULT_BUDGET,
    exact_min_hitting_set,
    greedy_hitting_set,
    hw_sample_net,
    max_r_independent,
    min_epsilon_net,
)


class CertificateContradiction(RuntimeError):
    """A candidate smaller than a certified minimum turned out to be a net."""


@dataclass
class GrowthRow:
    eps: Fraction
    r: int
    c: int
    d: int
    n_rects: int
    lower_bound: int
    certified: bool
    bound_method: str
    greedy_size: int | None = None
    exact_size: int | None = None
    sample_size: int | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def normalized_lower(self) -> Fraction:
        """eps times the certified lower bound, to set against r/2."""
        return self.eps * self.lower_bound

    def csv_record(self) -> dict:
        rec = asdict(self)
        rec["eps"] = str(self.eps)
        rec["normalized_lower"] = str(self.normalized_lower)
        rec["half_r"] = str(Fraction(self.r, 2))
        rec["half_n"] = str(Fraction(self.n_rects, 2))
        rec["timings"] = ";".join(f"{k}={v:.3f}" for k, v in self.timings.items())
        return rec


GROWTH_FIELDS = [
    "eps", "r", "c", "d", "n_rects", "lower_bound", "certified", "bound_method",
    "half_n", "normalized_lower", "half_r", "greedy_size", "exact_size", "sample_size", "timings",
]


def growth_row(r: int, modes=("greedy",), budget: int = DEFAULT_BUDGET, seed: int = 0,
               exact_independence_limit: int = 64) -> GrowthRow:
    """One row of the growth table for the parameter schedule at this r.

    The lower bound is n - (max r-independent size). For small families the
    maximum is computed exactly by the solver; otherwise the independence
    bound (r-1)(c-1)/(c-2) c^(d-1) is used, which is recorded in
    ``bound_method``.
    """
    eps = eps_for_r(r)
    r_, c, d = theorem1_parameters(eps)
    assert r_ == r
    timings = {}
    t0 = time.perf_counter()
    fam = build_family(c, d)
    rs = dual_space(fam)
    n = len(fam)
    timings["build"] = time.perf_counter() - t0

    lemma_lb = n - int(max_independent_bound(c, d, r))
    lower, certified, method = lemma_lb, True, "independence-bound"
    if n <= exact_independence_limit:
        t0 = time.perf_counter()
        indep = max_r_independent(rs, r, budget)
        timings["independence"] = time.perf_counter() - t0
        if indep.optimal:
            lower, method = n - indep.size, "exact-independence"
        else:
            certified = False
    row = GrowthRow(eps, r, c, d, n, lower, certified, method, timings=timings)

    heavy = heavy_ranges(rs, eps)
    if "greedy" in modes:
        t0 = time.perf_counter()
        row.greedy_size = len(greedy_hitting_set(heavy))
        timings["greedy"] = time.perf_counter() - t0
    if "exact" in modes:
        t0 = time.perf_counter()
        res = exact_min_hitting_set(heavy, budget)
        timings["exact"] = time.perf_counter() - t0
        if res.optimal:
            row.exact_size = res.size
    if "sample" in modes:
        t0 = time.perf_counter()
        # VC-dimension 2 of these dual spaces is checked at small scale
        row.sample_size = len(hw_sample_net(rs, eps, seed, vc=2).net)
        timings["sample"] = time.perf_counter() - t0
    for size in (row.greedy_size, row.exact_size, row.sample_size):
        if size is not None and size < row.lower_bound:
            raise CertificateContradiction(f"net of size {size} below certified bound {row.lower_bound}")
    return row


def growth_table(r_values, modes=("greedy",), budget: int = DEFAULT_BUDGET, seed: int = 0) -> list[GrowthRow]:
    return [growth_row(r, modes, budget, seed) for r in sorted(r_values)]


def growth_csv(rows: list[GrowthRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=GROWTH_FIELDS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.csv_record())
    return buf.getvalue()


@dataclass
class FalsifyReport:
    size: int
    samples: int
    failures: int
    witnesses: list[tuple[tuple[int, ...], tuple[int, ...]]]

    @property
    def failure_rate(self) -> float:
        return self.failures / self.samples if self.samples else 1.0

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "samples": self.samples,
            "failures": self.failures,
            "failure_rate": self.failure_rate,
            "witnesses": [{"candidate": list(c), "unhit_range": list(w)} for c, w in self.witnesses],
        }


def falsify_small_nets(rs: RangeSpace, eps, size: int, samples: int, seed: int) -> FalsifyReport:
    """Random candidates of the given size must all fail to be eps-nets."""
    rng = np.random.default_rng(seed)
    witnesses = []
    for _ in range(samples):
        cand = tuple(sorted(rng.choice(rs.n, size=size, replace=False).tolist()))
        verdict = is_epsilon_net(rs, eps, cand)
        if verdict.ok:
            raise CertificateContradiction(f"candidate {cand} of size {size} is an eps-net")
        witnesses.append((cand, verdict.witness))
    return FalsifyReport(size, samples, len(witnesses), witnesses)


def lemma21_report(c: int, d: int, r: int, budget: int = DEFAULT_BUDGET, exhaustive_limit: int = 16) -> dict:
    """Maximum r-independent subfamily of R(c, d) against the independence bound.

    For families with at most ``exhaustive_limit`` members, every subset is
    also enumerated: this cross-checks the solver and tests the bad-rectangle inequality
    on each independent subset.
    """
    fam = build_family(c, d)
    n = len(fam)
    bound = max_independent_bound(c, d, r)
    res = max_r_independent(fam, r, budget)
    report = {
        "c": c, "d": d, "r": r, "n_rects": n, "bound": str(bound),
        "max_independent": res.size, "optimal": res.optimal, "upper_bound": res.upper_bound,
        "nodes": res.nodes_explored,
        "within_bound": res.upper_bound <= bound,
    }
    ok = report["within_bound"]
    if n <= exhaustive_limit:
        best = 0
        checked = 0
        ineq_ok = True
        limit = (r - 1) * c ** (d - 1)
        for mask in range(1 << n):
            subset = [i for i in range(n) if mask >> i & 1]
            if not is_r_independent(fam, subset, r).ok:
                continue
            checked += 1
            best = max(best, len(subset))
            if len(subset) > (r - 1) * len(bad_rectangles(fam, subset)) + limit:
                ineq_ok = False
        report.update(exhaustive_max=best, independent_sets=checked, inequality_x_holds=ineq_ok,
                      solver_matches_exhaustive=best == res.size)
        ok = ok and ineq_ok and best == res.size
    report["ok"] = bool(ok)
    return report


def _random_fraction(rng: np.random.Generator, lo: int = 1, hi: int = 40, den: int = 12) -> Fraction:
    return Fraction(int(rng.integers(lo, hi)), int(rng.integers(1, den)))


def _random_span(rng: np.random.Generator) -> tuple[Fraction, Fraction]:
    a = _random_fraction(rng)
    b = _random_fraction(rng)
    while b == a:
        b = _random_fraction(rng)
    return min(a, b), max(a, b)


def duality_report(c: int, d: int, samples: int, seed: int) -> dict:
    """Incidence equivalence q in R <=> p(R) in B(q) on random pairs, then on R(c, d)."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    inside = 0
    for _ in range(samples):
        x1, x2 = _random_span(rng)
        y1, y2 = _random_span(rng)
        rect = Rect(x1, x2, y1, y2, closed=(True,) * 4)
        if rng.random() < 0.5:
            # bias towards the rectangle and its boundary
            q = (x1 + (x2 - x1) * Fraction(int(rng.integers(0, 5)), 4),
                 y1 + (y2 - y1) * Fraction(int(rng.integers(0, 5)), 4))
        else:
            q = (_random_fraction(rng), _random_fraction(rng))
        a = rect.contains(q)
        b = query_box(q).contains(rect_to_point4(rect))
        inside += a
        mismatches += a != b
    fam = build_family(c, d)
    points, boxes = theorem2_instance(fam)
    iso = box_incidence_space(points, boxes).ranges == dual_space(fam).ranges
    return {
        "samples": samples, "inside": inside, "mismatches": mismatches,
        "family": [c, d], "box_space_isomorphic": iso,
        "ok": mismatches == 0 and iso,
    }


def lemma23_report(sets: int, boxes: int, seed: int, max_points: int = 50, max_dim: int = 4) -> dict:
    """Random positive point sets: corner-box membership equals half-space membership after rescaling."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    origin_ok = True
    for _ in range(sets):
        m = int(rng.integers(1, max_dim + 1))
        n = int(rng.integers(1, max_points + 1))
        # few distinct values per axis so ties and shared coordinates occur
        pool = [_random_fraction(rng, 1, 30, 6) for _ in range(max(2, n // 2))]
        points = [tuple(pool[int(rng.integers(len(pool)))] for _ in range(m)) for _ in range(n)]
        original = axis_values(points)
        scaled = rescale_for_halfspaces(points, m)
        grid = axis_values(scaled)
        for k in range(boxes):
            if k % 2:
                uppers = tuple(_random_fraction(rng, 1, 40, 6) for _ in range(m))
            else:
                uppers = tuple(axis[int(rng.integers(len(axis)))] for axis in original)
            box = CornerBox(uppers)
            h = halfspace_from_box(transfer_box(box, original, grid, m), grid, m)
            origin_ok &= h.contains((Fraction(0),) * m)
            before = {i for i, p in enumerate(points) if box.contains(p)}
            after = {i for i, p in enumerate(scaled) if h.contains(p)}
            mismatches += before != after
    return {"sets": sets, "boxes_per_set": boxes, "mismatches": mismatches,
            "origin_inside": origin_ok, "ok": mismatches == 0 and origin_ok}


def vc_report(c: int, d: int, cap: int = 4) -> dict:
    fam = build_family(c, d)
    return {"c": c, "d": d, "dual": vc_dimension(dual_space(fam), cap),
            "primal": vc_dimension(primal_space(fam), cap)}


def theorem3_report(c: int, d: int, eps, budget: int = DEFAULT_BUDGET) -> dict:
    fam = build_family(c, d)
    points, halfspaces = theorem3_instance(fam)
    hs = halfspace_space(points, halfspaces)
    dual = dual_space(fam)
    a = min_epsilon_net(hs, eps, budget)
    b = min_epsilon_net(dual, eps, budget)
    return {"c": c, "d": d, "points": len(points), "halfspaces": len(halfspaces),
            "isomorphic": hs.ranges == dual.ranges, "vc": vc_dimension(hs, 4),
            "net_halfspace": a.size, "net_rect_dual": b.size,
            "ok": hs.ranges == dual.ranges and a.size == b.size}
