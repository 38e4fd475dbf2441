import pytest
from hypothesis import given, settings, strategies as st

from todatau.applications import GUE_F, GUE_G, gw_data
from todatau.exact import LatticePoly, Rational
from todatau.series import TruncSeries
from todatau.wave import (build_pair, correlators_wave, gue_pair_closed, projector_entries, reduced_kernel,
                          verify_K_D_relation, verify_rp_initial, yz_recursion)

n = LatticePoly.n()
ZERO, ONE = LatticePoly.const(0), LatticePoly.const(1)


def test_gue_recursion_first_terms():
    y, z = yz_recursion(GUE_F, GUE_G, 4)
    assert y[:2] == [ZERO, -n]
    assert z[:2] == [ZERO, n + 2]


def test_recursion_matches_closed_gue_pair():
    built, closed = build_pair(GUE_F, GUE_G, 10), gue_pair_closed(10)
    assert built.chi_A.coeffs == closed.chi_A.coeffs
    assert built.chi_B.coeffs == closed.chi_B.coeffs
    assert closed.pair_defect().coeffs == [ONE] + [ZERO] * 10


@pytest.mark.parametrize("data", [(GUE_F, GUE_G), gw_data(), (n + 1, n * n + 1)], ids=["gue", "gw", "generic"])
def test_pair_reports(data):
    p = build_pair(*data, 8)
    assert verify_rp_initial(p).passed
    assert verify_K_D_relation(p).passed


def test_zero_g_rejected():
    with pytest.raises(ValueError):
        build_pair(n, 0, 4)


def test_projector_leading_terms():
    m11, m12, m21, m22 = projector_entries(build_pair(GUE_F, GUE_G, 4))
    assert m11.coeffs[:3] == [ONE, ZERO, n]
    assert m21.coeffs[:2] == [ZERO, ONE]


def test_reduced_kernel_pole_is_one():
    D = reduced_kernel(build_pair(*gw_data(), 6))
    assert D.pole.coeffs == [ONE] + [ZERO] * 6


def test_gue_two_point_values():
    out = correlators_wave((GUE_F, GUE_G), 2, 2)
    assert out[(0, 0)] == n
    assert out[(1, 1)] == 2 * n * n
    assert out[(0, 2)] == 3 * n * n


series_entries = st.lists(st.fractions(max_denominator=4).map(Rational), min_size=12, max_size=12)


@settings(max_examples=8, deadline=None)
@given(series_entries)
def test_constant_regauging_leaves_correlators_unchanged(cs):
    G = TruncSeries([Rational(1)] + cs, 12, Rational(0))
    for data in ((GUE_F, GUE_G), gw_data()):
        p = build_pair(*data, 12)
        q = p.regauged(G)
        assert q.pair_defect().coeffs == [ONE] + [ZERO] * 12
        assert correlators_wave(q, 2, 3) == correlators_wave(p, 2, 3)
        assert correlators_wave(q, 3, 1) == correlators_wave(p, 3, 1)
