import pytest
from hypothesis import given, settings, strategies as st

from todatau.exact import LatticePoly, shift_n
from todatau.parsing import ParseError
from todatau.ring import (AdmissibleDerivation, ShiftRangeError, TodaPoly, apply_derivation,
                          lax_derivation_images, substitute_initial)

P = TodaPoly.parse
var = st.builds(lambda k, s: TodaPoly.var(k, s), st.integers(0, 1), st.integers(-3, 3))
mono = st.lists(var, min_size=0, max_size=3).map(lambda vs: _prod(vs))
polys = st.lists(st.tuples(st.integers(-5, 5), mono), max_size=4).map(
    lambda ts: sum((m * c for c, m in ts), TodaPoly.zero()))


def _prod(vs):
    out = TodaPoly.const(1)
    for x in vs:
        out = out * x
    return out


def test_parse_and_render():
    p = P("w_0*(v_0 - v_{-1})")
    assert p.to_text() == "-v_{-1}*w_0 + v_0*w_0"
    assert P(p.to_text()) == p
    assert P("(v_0 + 1)^2 - 2*v_0") == P("v_0^2 + 1")
    assert P("1/2*w_3").to_text() == "1/2*w_3"
    with pytest.raises(ParseError):
        P("u_0")


def test_shift_examples():
    assert P("v_0*w_1").shift(2) == P("v_2*w_3")
    assert P("w_0").shift(-1) == P("w_{-1}")
    with pytest.raises(ShiftRangeError):
        P("v_60").shift(10)


@given(polys, st.integers(-5, 5), st.integers(-5, 5))
def test_shift_composition(p, a, b):
    assert p.shift(a).shift(b) == p.shift(a + b)


@given(polys, polys)
def test_shift_is_ring_map(p, q):
    assert (p * q).shift(1) == p.shift(1) * q.shift(1)
    assert (p + q).shift(-1) == p.shift(-1) + q.shift(-1)


D0 = AdmissibleDerivation(P("w_1 - w_0"), P("w_0*(v_0 - v_{-1})"))


@given(polys, polys)
def test_derivation_leibniz(p, q):
    assert apply_derivation(D0, p * q) == apply_derivation(D0, p) * q + p * apply_derivation(D0, q)


@given(polys, st.integers(-3, 3))
def test_derivation_commutes_with_shift(p, k):
    assert apply_derivation(D0, p.shift(k)) == apply_derivation(D0, p).shift(k)


def test_derivation_on_constant():
    assert apply_derivation(D0, TodaPoly.const(7)) == 0


def test_lax_images_first_two():
    assert lax_derivation_images(0) == (P("w_1 - w_0"), P("w_0*v_0 - w_0*v_{-1}"))
    dv, dw = lax_derivation_images(1)
    assert dv == P("w_1*(v_1 + v_0) - w_0*(v_0 + v_{-1})")
    assert dw == P("w_0*(w_1 - w_{-1} + v_0^2 - v_{-1}^2)")


n = LatticePoly.n()
F, G = n * n + 1, 2 * n - 3


@settings(max_examples=40)
@given(polys, polys)
def test_substitute_is_homomorphism(p, q):
    sp, sq = substitute_initial(p, F, G), substitute_initial(q, F, G)
    assert substitute_initial(p * q, F, G) == sp * sq
    assert substitute_initial(p + q, F, G) == sp + sq
    assert substitute_initial(p.shift(1), F, G) == shift_n(sp, 1)


def test_substitute_example():
    assert substitute_initial(P("w_0*(v_0 - v_{-1})"), F, G) == G * (F - shift_n(F, -1))
