"""The eleven acceptance criteria; a per-criterion summary is printed at the end of the run."""

import itertools

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from todatau.applications import (GUE_F, GUE_G, gw_data, gw_kernel_check, verify_binomial_identities,
                                  verify_gue_routes, verify_gue_wick, verify_gue_closed, verify_gw_routes)
from todatau.exact import LatticePoly, Rational
from todatau.prewave import (CPoly, prewave_compute, prewave_correlators, verify_AB_formulas, verify_dpre_pair,
                             verify_projector_entries)
from todatau.resolvent import lattice_ring, mr_compute, verify_gradient_identity
from todatau.ring import TodaPoly, lax_derivation_images
from todatau.series import TruncSeries
from todatau.tau import (correlators_kernel, correlators_mr, ledger_order, omega_multi, tau_structure,
                         toda_derivation, verify_commutativity, verify_tau_axioms)
from todatau.wave import build_pair, correlators_wave

from reference_values import DERIVATION_IMAGES, OMEGA_00, OMEGA_01_AS_LISTED, P, R_FIRST, S_FIRST, prewave_first_terms


def _ok(rep):
    assert rep.passed, rep.to_text()


def test_c01_first_resolvent_coefficients(criterion):
    with criterion(1, "R through lambda^-3"):
        r = mr_compute(3)
        for power, block in enumerate(R_FIRST):
            got = list(r.matrix_coefficient(power).e)
            assert got == [P(x) for row in block for x in row], power


def test_c02_axioms_and_canonical_vanishing(criterion):
    with criterion(2, "axioms p, q, r <= 5"):
        _ok(verify_tau_axioms(5))


def test_c03_reference_values(criterion):
    with criterion(3, "S_0, S_1, Omega_00"):
        ts = tau_structure()
        for p, text in S_FIRST.items():
            assert ts.S(p) == P(text)
        assert ts.omega2(0, 0) == P(OMEGA_00)
    with criterion(3, "D_0, D_1 images"):
        r = mr_compute(6)
        for k, (dv, dw) in DERIVATION_IMAGES.items():
            D = toda_derivation(r, k)
            assert (D(TodaPoly.v(0)), D(TodaPoly.w(0))) == (P(dv), P(dw))
    with criterion(3, "MR vs Lax derivations k <= 4"):
        for k in range(5):
            D = toda_derivation(mr_compute(k + 1), k)
            assert (D(TodaPoly.v(0)), D(TodaPoly.w(0))) == lax_derivation_images(k)


@pytest.mark.xfail(strict=True, reason="the listed Omega_{0,1} is the lattice shift of the value fixed by "
                                       "(L - 1) Omega_{0,1} = D_1 S_0")
def test_c03_listed_omega01(criterion):
    with criterion(3, "listed Omega_01", expected_failure=True):
        assert tau_structure().omega2(0, 1) == P(OMEGA_01_AS_LISTED)


def test_c04_commutativity(criterion):
    with criterion(4, "D_p D_q = D_q D_p, p, q <= 4"):
        _ok(verify_commutativity(4))


def test_c05_gradient_identity(criterion):
    with criterion(5, "bi-order (6, 6), both regions"):
        rep = verify_gradient_identity(mr_compute(13), (6, 6))
        _ok(rep)
        assert {c.name for c in rep.checks} >= {"region mu", "region lambda"}


@pytest.mark.parametrize("k,cap", [(2, 4), (3, 3)])
def test_c06_pipeline_triangle(criterion, k, cap):
    with criterion(6, f"triangle k = {k}"):
        mr = correlators_mr(k, cap)
        assert correlators_kernel(k, cap) == mr
        for idx, val in mr.items():
            assert omega_multi(idx) == val, idx


@pytest.mark.parametrize("k,cap", [(2, 4), (3, 3)])
def test_c06_regions_and_symmetry(criterion, k, cap):
    with criterion(6, f"regions and symmetry k = {k}"):
        base = correlators_mr(k, cap, stable=False)
        for region in itertools.permutations(range(k)):
            assert correlators_mr(k, cap, stable=False, region=region) == base
        kern = correlators_kernel(k, cap, stable=False)
        assert correlators_kernel(k, cap, stable=False, region=tuple(reversed(range(k)))) == kern
        perms = sorted({p for idx in base for p in itertools.permutations(idx)})
        spread = correlators_mr(k, 0, indices=perms, stable=False, order=ledger_order(k, k * cap))
        for p, val in spread.items():
            assert val == base[tuple(sorted(p))], p


def test_c07_gue(criterion):
    with criterion(7, "wave vs MR k = 2 <= 6"):
        _ok(verify_gue_routes(2, 6))
    with criterion(7, "wave vs MR k = 3 <= 3"):
        _ok(verify_gue_routes(3, 3))
    with criterion(7, "closed kernel through order 8"):
        _ok(verify_gue_closed(8))
    with criterion(7, "binomial identities j <= 30"):
        _ok(verify_binomial_identities(30))
    with criterion(7, "Wick oracle n = 1..6"):
        _ok(verify_gue_wick(3, 8, samples=range(1, 7)))


def test_c08_gw(criterion):
    with criterion(8, "wave vs MR k = 2 <= 4, even eps powers"):
        _ok(verify_gw_routes(2, 4))
    with criterion(8, "closed kernel p + q <= 4, k <= 3"):
        _ok(gw_kernel_check(4, 3))


def test_c09_prewave(criterion):
    with criterion(9, "projector entries order 5"):
        _ok(verify_projector_entries(5))
    with criterion(9, "psi_A, psi_B through lambda^-3"):
        A, B = prewave_compute(3)
        wantA, wantB = prewave_first_terms()
        for i in range(4):
            assert A[i] == wantA[i] * CPoly.lambda_n(1)
            assert B[i] == wantB[i] * CPoly.lambda_n(-1) * CPoly.e_sigma(1)
    with criterion(9, "A/B formulas order 6"):
        _ok(verify_AB_formulas(6))
    with criterion(9, "prewave route k = 2 <= 3"):
        assert prewave_correlators(2, 3) == correlators_mr(2, 3)
    with criterion(9, "d_pre pair property order 6"):
        rep = verify_dpre_pair(6)
        # a failure here would be a documented finding rather than a test failure
        assert rep.passed or rep.findings
        assert not rep.findings, rep.to_text()


_ONE, _ZERO = LatticePoly.const(1), LatticePoly.const(0)
entries = st.lists(st.fractions(max_denominator=5).map(Rational), min_size=12, max_size=12)


@settings(max_examples=6, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(entries)
def test_c10_pair_regauging(criterion, cs):
    with criterion(10, "wave pair G"):
        G = TruncSeries([Rational(1)] + cs, 12, Rational(0))
        for data in ((GUE_F, GUE_G), gw_data()):
            p = build_pair(*data, 12)
            q = p.regauged(G)
            for k, cap in ((2, 4), (3, 1)):
                assert correlators_wave(q, k, cap) == correlators_wave(p, k, cap)


@settings(max_examples=4, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(entries, entries, st.integers(1, 5))
def test_c10_prewave_rescaling(criterion, g, e, e0):
    with criterion(10, "prewave G and E"):
        G = TruncSeries([Rational(1)] + g, 12, Rational(0))
        E = TruncSeries([Rational(e0)] + e, 12, Rational(0))
        base = prewave_correlators(2, 2, stable=False)
        assert prewave_correlators(2, 2, stable=False, G=G, E=E) == base
        assert prewave_correlators(2, 2, stable=False, G=G) == base


def _stable(compute, k, cap):
    order = ledger_order(k, k * cap)
    assert compute(order) == compute(order + 2)


def test_c11_truncation_stability(criterion):
    with criterion(11, "MR route"):
        _stable(lambda o: correlators_mr(3, 2, order=o, stable=False), 3, 2)
    with criterion(11, "kernel route"):
        _stable(lambda o: correlators_kernel(3, 2, order=o, stable=False), 3, 2)
    with criterion(11, "wave route, GUE and GW"):
        for data in ((GUE_F, GUE_G), gw_data()):
            _stable(lambda o: correlators_wave(data, 2, 4, order=o, stable=False), 2, 4)
    with criterion(11, "MR route on lattice data"):
        ring = lattice_ring(*gw_data())
        _stable(lambda o: correlators_mr(2, 4, ring=ring, order=o, stable=False), 2, 4)
    with criterion(11, "prewave route"):
        _stable(lambda o: prewave_correlators(2, 2, order=o, stable=False), 2, 2)
