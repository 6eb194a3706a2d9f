import csv
import io
from fractions import Fraction

import pytest

from epsnets.construction import build_family, chain_blowup, dual_space
from epsnets.rangespace import from_incidences
from epsnets.reports import (
    CertificateContradiction,
    duality_report,
    falsify_small_nets,
    growth_csv,
    growth_row,
    growth_table,
    lemma21_report,
    lemma23_report,
    theorem3_report,
    vc_report,
)

EPS1 = Fraction(1, 128)


def test_growth_r2():
    row = growth_row(2, modes=("greedy", "exact", "sample"), seed=1)
    assert (row.c, row.d, row.n_rects) == (4, 2, 12)
    assert row.certified and row.bound_method == "exact-independence"
    assert 2 * row.lower_bound >= row.n_rects
    assert row.exact_size >= row.lower_bound
    assert row.greedy_size >= row.exact_size
    assert row.sample_size >= row.lower_bound


def test_growth_csv_reproducible():
    a = growth_csv(growth_table([2], ("greedy", "sample"), seed=4))
    b = growth_csv(growth_table([2], ("greedy", "sample"), seed=4))
    strip = lambda text: [{k: v for k, v in r.items() if k != "timings"} for r in csv.DictReader(io.StringIO(text))]
    assert strip(a) == strip(b)
    row = strip(a)[0]
    assert row["eps"] == "1/128" and row["half_r"] == "1" and row["half_n"] == "6"


def test_falsify_r2_size5():
    rs = dual_space(build_family(4, 2))
    rep = falsify_small_nets(rs, EPS1, 5, 100, 0)
    assert rep.failures == rep.samples == 100
    for cand, witness in rep.witnesses:
        assert set(cand).isdisjoint(witness)


def test_falsify_size0():
    rs = from_incidences(3, [[0, 1]])
    assert falsify_small_nets(rs, Fraction(1, 2), 0, 3, 0).failure_rate == 1
    with pytest.raises(CertificateContradiction):
        falsify_small_nets(from_incidences(3, [[0]]), 1, 0, 1, 0)


def test_falsify_blowup():
    rs = dual_space(chain_blowup(build_family(4, 2), 3))
    assert falsify_small_nets(rs, EPS1, 5, 100, 2).failure_rate == 1


def test_falsify_contradiction():
    rs = from_incidences(3, [[0, 1, 2]])
    with pytest.raises(CertificateContradiction):
        falsify_small_nets(rs, 1, 1, 5, 0)


def test_lemma21_report():
    rep = lemma21_report(3, 2, 2)
    assert rep["ok"] and rep["max_independent"] <= 6
    assert rep["solver_matches_exhaustive"] and rep["inequality_x_holds"]


def test_small_reports():
    assert duality_report(3, 2, 300, 0)["ok"]
    assert lemma23_report(10, 10, 0)["ok"]
    assert vc_report(3, 2) == {"c": 3, "d": 2, "dual": 2, "primal": 2}
    assert theorem3_report(3, 2, Fraction(1, 20))["ok"]
