from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import range_spaces
from epsnets.construction import Rect, build_family, dual_space, witness_points
from epsnets.rangespace import (
    RangeSpace,
    RangeSpaceError,
    dualize,
    from_incidences,
    heavy_ranges,
    is_epsilon_net,
    is_shattered,
    minimal_ranges,
    replicate,
    vc_dimension,
    vc_dimension_exhaustive,
)


def test_dedup_equal_ranges():
    rs = from_incidences(3, [[0, 1], [1, 0]])
    assert rs.ranges == ((0, 1),)


def test_empty_space():
    rs = from_incidences(0, [])
    assert rs.n == 0 and rs.ranges == ()


def test_out_of_bounds_index_rejected():
    with pytest.raises(RangeSpaceError):
        from_incidences(2, [[0, 2]])
    with pytest.raises(RangeSpaceError):
        from_incidences(2, [[-1]])


def test_dual_of_r42_has_twelve_elements():
    assert dual_space(build_family(4, 2)).n == 12


@given(range_spaces())
def test_normalization_idempotent(rs):
    again = from_incidences(rs.n, rs.ranges, rs.labels)
    assert again == rs
    assert all(list(r) == sorted(set(r)) for r in rs.ranges)
    assert len(set(rs.ranges)) == len(rs.ranges)


def test_heavy_ranges_threshold():
    rs = from_incidences(4, [[0], [0, 1], [1, 2, 3], [2, 3]])
    assert heavy_ranges(rs, Fraction(1, 2)).ranges == ((0, 1), (2, 3))


def test_heavy_ranges_eps_one_without_full_range():
    rs = from_incidences(3, [[0, 1], [2]])
    assert heavy_ranges(rs, 1).ranges == ()


def test_heavy_ranges_r42_at_one_twelfth():
    rs = dual_space(build_family(4, 2))
    nonempty = [r for r in rs.ranges if r]
    assert heavy_ranges(rs, Fraction(1, 12)).ranges == tuple(minimal_ranges(nonempty))


def test_heavy_threshold_is_exact():
    # 3 * (1/3) == 1 exactly, so singletons are heavy
    rs = from_incidences(3, [[0], [1, 2]])
    assert heavy_ranges(rs, Fraction(1, 3)).ranges == ((0,), (1, 2))
    assert heavy_ranges(rs, Fraction(1, 3) + Fraction(1, 10**9)).ranges == ((1, 2),)


def test_bad_eps_rejected():
    rs = from_incidences(2, [[0]])
    for eps in (0, Fraction(-1, 2), Fraction(3, 2)):
        with pytest.raises(RangeSpaceError):
            heavy_ranges(rs, eps)


@given(range_spaces(max_n=8), st.fractions(Fraction(1, 16), 1), st.data())
def test_minimal_heavy_hitting_matches_brute_force(rs, eps, data):
    heavy = [r for r in rs.ranges if r and len(r) >= eps * rs.n]
    minimal = heavy_ranges(rs, eps).ranges
    assert set(minimal) <= set(heavy)
    s = set(data.draw(st.sets(st.integers(0, max(rs.n - 1, 0)))) if rs.n else set())
    hits_all = all(s & set(r) for r in heavy)
    assert hits_all == all(s & set(r) for r in minimal)
    assert hits_all == is_epsilon_net(rs, eps, s).ok


def test_full_ground_is_net():
    rs = dual_space(build_family(3, 2))
    assert is_epsilon_net(rs, Fraction(1, 100), range(rs.n)).ok


def test_net_failure_has_witness():
    rs = from_incidences(3, [[0, 1]])
    v = is_epsilon_net(rs, Fraction(1, 2), [2])
    assert not v.ok and v.witness == (0, 1)


def test_theorem1_instance_rejects_every_five_set():
    rs = dual_space(build_family(4, 2))
    eps = Fraction(1, 128)
    for s in combinations(range(12), 5):
        v = is_epsilon_net(rs, eps, s)
        assert not v.ok and set(v.witness).isdisjoint(s)


@given(range_spaces(max_n=8), st.fractions(Fraction(1, 16), 1), st.fractions(Fraction(1, 16), 1), st.data())
def test_net_monotone_in_eps(rs, e1, e2, data):
    lo, hi = sorted((e1, e2))
    s = data.draw(st.sets(st.integers(0, max(rs.n - 1, 0)))) if rs.n else set()
    if is_epsilon_net(rs, lo, s).ok:
        assert is_epsilon_net(rs, hi, s).ok


def test_candidate_outside_ground_rejected():
    with pytest.raises(RangeSpaceError):
        is_epsilon_net(from_incidences(2, [[0]]), 1, [5])


def test_vc_all_subsets_of_pair():
    rs = from_incidences(2, [[], [0], [1], [0, 1]])
    assert vc_dimension(rs) == 2


def test_vc_r42_dual_and_r33_primal():
    from epsnets.construction import primal_space

    assert vc_dimension(dual_space(build_family(4, 2)), 4) == 2
    assert vc_dimension(primal_space(build_family(3, 3)), 4) == 2


def test_vc_cap_is_respected():
    rs = from_incidences(3, [list(s) for k in range(4) for s in combinations(range(3), k)])
    assert vc_dimension(rs, 2) == 2
    assert vc_dimension(rs, 8) == 3
    assert vc_dimension(rs, 0) == 0


@settings(max_examples=150, deadline=None)
@given(range_spaces(max_n=12, max_ranges=40))
def test_vc_matches_exhaustive(rs):
    assert vc_dimension(rs, 12) == vc_dimension_exhaustive(rs)


def test_is_shattered():
    rs = from_incidences(3, [[], [0], [1], [0, 1, 2]])
    assert is_shattered(rs, [0, 1])
    assert not is_shattered(rs, [1, 2])


def test_dualize_one_point_in_two_shapes():
    shapes = [Rect(Fraction(0), Fraction(1), Fraction(0), Fraction(1)),
              Rect(Fraction(0), Fraction(2), Fraction(0), Fraction(2))]
    rs = dualize([(Fraction(1, 2), Fraction(1, 2))], shapes)
    assert rs.ranges == ((0, 1),)


def test_dualize_point_in_no_shape():
    shapes = [Rect(Fraction(0), Fraction(1), Fraction(0), Fraction(1))]
    rs = dualize([(Fraction(5), Fraction(5))], shapes)
    assert rs.ranges == ((),)
    assert heavy_ranges(rs, Fraction(1, 2)).ranges == ()


def test_dualize_r31_over_witnesses():
    f = build_family(3, 1)
    rs = dualize(witness_points(f), f.rects)
    assert len(witness_points(f)) == 9
    assert {r for r in rs.ranges if r} == {(0, 1), (0,), (1,)}


@given(range_spaces(max_n=6), st.integers(1, 3))
def test_replicate_scales_ranges(rs, t):
    rep = replicate(rs, t)
    assert rep.n == rs.n * t
    assert sorted(len(r) for r in rep.ranges) == sorted(len(r) * t for r in rs.ranges)


@given(range_spaces(max_n=8))
def test_json_round_trip(rs):
    assert RangeSpace.from_json(rs.to_json()) == rs


def test_json_field_order_and_labels():
    rs = from_incidences(2, [[1], [0, 1]], labels=[(Fraction(1, 2), 0), "b"])
    d = rs.to_dict()
    assert list(d) == ["n", "ranges", "labels"]
    assert d["ranges"] == [[0, 1], [1]]
    back = RangeSpace.from_dict(d)
    assert back.ranges == rs.ranges


def test_json_missing_field():
    with pytest.raises(RangeSpaceError, match="ranges"):
        RangeSpace.from_dict({"n": 3})
