import pytest
from hypothesis import given, settings, strategies as st

from todatau.exact import Rational
from todatau.prewave import (CPoly, b_shift, cring_shift, dpre_direct, dpre_expected, n_symbol, p_map,
                             prewave_compute, prewave_correlators, reduce_monomial, s_operator, s_split,
                             verify_AB_formulas, verify_dpre_pair, verify_projector_entries)
from todatau.ring import TodaPoly
from todatau.series import TruncSeries
from todatau.tau import correlators_mr, omega_multi

from reference_values import prewave_first_terms

P = TodaPoly.parse
m = lambda text: CPoly.m(P(text))
C = lambda text: CPoly.from_toda(P(text))
Ln, E = CPoly.lambda_n, CPoly.e_sigma

var = st.builds(lambda k, s: TodaPoly.var(k, s), st.integers(0, 1), st.integers(-3, 3))
monos = st.lists(var, min_size=1, max_size=3).map(lambda vs: _prod(vs))
polys = st.lists(st.tuples(st.integers(-4, 4), monos), max_size=4).map(
    lambda ts: sum((x * c for c, x in ts), TodaPoly.zero()))


def _prod(vs):
    out = TodaPoly.const(1)
    for x in vs:
        out = out * x
    return out


def _reduced(x):
    return reduce_monomial(x)[0]


cpolys = st.lists(st.tuples(st.integers(-3, 3), monos, st.lists(monos, max_size=2), st.integers(-1, 1),
                            st.integers(-1, 1)), max_size=3).map(
    lambda ts: sum((CPoly.from_toda(a) * _mprod(ms) * E(s) * Ln(l) * c for c, a, ms, s, l in ts), CPoly()))


def _mprod(ms):
    out = CPoly.const(1)
    for x in ms:
        out = out * CPoly.m(_reduced(x))
    return out


def test_reduce_monomial_examples():
    assert reduce_monomial(P("v_2*w_3")) == (P("v_0*w_1"), -2)
    assert reduce_monomial(P("w_{-1}")) == (P("w_0"), 1)
    assert reduce_monomial(P("v_0")) == (P("v_0"), 0)
    assert reduce_monomial(P("w_{-2}*w_1*v_3")) == (P("w_{-5}*w_{-2}*v_0"), -3)
    with pytest.raises(ValueError):
        reduce_monomial(TodaPoly.const(1))


def test_shift_examples():
    assert cring_shift(m("v_0"), 1) == m("v_0") + C("v_0")
    assert cring_shift(m("v_0"), -1) == m("v_0") - C("v_{-1}")
    assert cring_shift(Ln(1), 2) == Ln(1) * CPoly.lam(2)


def test_sigma_shift_rule():
    down = cring_shift(E(1), -1)
    assert down == E(1) * CPoly.w_power(0, -1)
    # e^{(1 - Lambda^{-1})(-sigma)} = w_0
    assert down * C("w_0") == E(1)
    assert cring_shift(E(1), 1) == E(1) * C("w_1")


@settings(max_examples=40, deadline=None)
@given(cpolys, st.integers(-3, 3), st.integers(-3, 3))
def test_shift_composition(p, a, b):
    assert cring_shift(cring_shift(p, a), b) == cring_shift(p, a + b)


@settings(max_examples=40, deadline=None)
@given(cpolys, cpolys)
def test_shift_is_multiplicative(p, q):
    assert cring_shift(p * q, -1) == cring_shift(p, -1) * cring_shift(q, -1)


def test_s_operator_examples():
    assert s_operator(P("v_0")) == m("v_0")
    assert s_operator(P("v_1")) == m("v_0") + C("v_0")
    assert s_operator(P("w_0 + v_0^2")) == m("w_0") + m("v_0^2")
    with pytest.raises(ValueError):
        s_operator(P("v_0 + 1"))


@given(polys)
def test_s_operator_inverts_difference(q):
    s = s_operator(q)
    assert cring_shift(s, 1) - s == CPoly.from_toda(q)
    mpart, rest = s_split(q)
    assert sum((CPoly.m(TodaPoly._raw({b: 1})) * c for b, c in mpart.items()), CPoly.from_toda(rest)) == s


@given(st.lists(st.tuples(st.integers(-3, 3), monos), max_size=3))
def test_p_of_difference_is_plain(pairs):
    elem = [(c, [a]) for c, a in pairs]
    diff = b_shift(elem, 1) + [(-c, monos_) for c, monos_ in elem]
    assert p_map(diff) == CPoly.from_toda(sum((a * c for c, a in pairs), TodaPoly.zero()))


def test_n_symbol_negative_offset():
    b = P("v_0*w_1")
    packed = next(iter(b.coefficient_map()))
    assert n_symbol(packed, -2) == CPoly.m(b) - C("v_{-1}*w_0") - C("v_{-2}*w_{-1}")


def test_first_prewave_coefficients():
    A, B = prewave_compute(3)
    wantA, wantB = prewave_first_terms()
    for i in range(4):
        assert A[i] == wantA[i] * Ln(1)
        assert B[i] == wantB[i] * Ln(-1) * E(1)


def test_rendering():
    A, B = prewave_compute(1)
    assert A[1].to_text() == "-m[v_0]*L^1"
    assert cring_shift(E(1), -1).to_text() == "w_0^-1*E^1"


def test_pair_property_direct_low_order():
    d = dpre_direct(3)
    assert d == dpre_expected()
    assert d.lam_part(1) == cring_shift(E(1), -1)
    assert d.lam_part(0) == CPoly()


def test_reports():
    assert verify_projector_entries(5).passed
    assert verify_AB_formulas(6).passed
    rep = verify_dpre_pair(6)
    assert rep.passed and not rep.findings, rep.to_text()


def test_prewave_correlators_small():
    assert prewave_correlators(2, 2) == correlators_mr(2, 2)
    assert prewave_correlators(3, 0)[(0, 0, 0)] == omega_multi((0, 0, 0))


series_entries = st.lists(st.integers(-3, 3), min_size=10, max_size=10)


@settings(max_examples=5, deadline=None)
@given(series_entries, series_entries)
def test_rescaling_prewave_functions(g, e):
    G = TruncSeries([Rational(1)] + [Rational(c) for c in g], 10, Rational(0))
    Es = TruncSeries([Rational(2)] + [Rational(c, 2) for c in e], 10, Rational(0))
    base = prewave_correlators(2, 1, stable=False)
    assert prewave_correlators(2, 1, stable=False, G=G, E=Es) == base
