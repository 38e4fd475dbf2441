import json
import os

import pytest

from todatau.applications import (binomial_identity_lhs, closed_gw_slot, gue_correlators,
                                  gue_wick_oracle, gw_closed_kernel_regular, gw_correlators, gw_data,
                                  gw_kernel_check, verify_binomial_identities, verify_gue_routes, verify_gue_wick,
                                  verify_gue_closed, verify_gw_routes, gue_closed_coefficient)
from todatau.exact import EpsScalar, LatticePoly, Rational
from todatau.wave import build_pair, reduced_kernel

n = LatticePoly.n()
GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "gue_wick.json")


def test_closed_series_examples():
    assert gue_closed_coefficient(1, 2) == n * (n + 1) / 2
    assert gue_closed_coefficient(2, 1) == (n - 1) * n / 2
    assert gue_closed_coefficient(1, 1) == 0


def test_closed_series_equals_pair_kernel():
    rep = verify_gue_closed(8)
    assert rep.passed, rep.to_text()


def test_oracle_examples():
    assert gue_wick_oracle((1, 1), 3) == 3
    assert gue_wick_oracle((2,), 5) == 25
    assert gue_wick_oracle((1, 1, 1), 4) == 0
    assert gue_wick_oracle((2, 2), 3, connected=False) == 81 + 2 * 9


def test_oracle_rejects_bad_size():
    with pytest.raises(ValueError):
        gue_wick_oracle((1, 1), 0)


@pytest.mark.parametrize("degrees,expected", [((1, 1), n), ((2, 2), 2 * n * n), ((1, 3), 3 * n * n),
                                              ((2, 4), 8 * n ** 3 + 4 * n), ((1, 1, 2), 2 * n)])
def test_gue_values(degrees, expected):
    assert gue_correlators(degrees) == expected


def test_gue_methods_agree():
    for degrees in ((2, 2), (1, 3), (3, 3), (1, 2, 3), (2, 2, 2)):
        z = gue_correlators(degrees)
        assert gue_correlators(degrees, "wave") == z
        assert gue_correlators(degrees, "mr") == z


def test_gue_against_golden_file():
    with open(GOLDEN) as fh:
        rows = json.load(fh)
    assert rows
    for row in rows:
        poly = gue_correlators(row["degrees"])
        for sample, value in row["values"].items():
            assert poly.evaluate(int(sample)) == EpsScalar.const(Rational(value)), (row["degrees"], sample)


def test_gue_wick_polynomial_identity():
    rep = verify_gue_wick()
    assert rep.passed, rep.to_text()


def test_gue_routes_small():
    assert verify_gue_routes(2, 3).passed


def test_binomial_identities():
    assert binomial_identity_lhs(0) == 0
    assert verify_binomial_identities(12).passed


def test_gw_two_point_leading():
    assert gw_correlators((0, 0), 0) == EpsScalar.eps(-2)
    assert gw_correlators((1, 1), 0) == EpsScalar.eps(-2) * Rational(1, 2)
    full = gw_correlators((2, 2), 3)
    assert full.min_power() == -2
    assert all(e % 2 == 0 for e in full.terms)
    assert gw_correlators((2, 2), 1) == EpsScalar({e: c for e, c in full.terms.items() if e <= 0})


def test_gw_routes_agree():
    for idx in ((0, 0), (1, 2), (0, 0, 1)):
        assert gw_correlators(idx, 3) == gw_correlators(idx, 3, method="mr")
    assert verify_gw_routes(2, 2).passed


def test_gw_closed_kernel():
    rep = gw_kernel_check(4, 3)
    assert rep.passed, rep.to_text()


def test_gw_first_closed_slot():
    assert closed_gw_slot(0, 0, 1) == 1
    assert gw_closed_kernel_regular(3)[(1, 1)] == EpsScalar.eps(-1)


def test_gw_closed_kernel_differs_from_unregauged_kernel():
    D = reduced_kernel(build_pair(*gw_data(), 4))
    assert D.regular(1, 1).evaluate(0) != EpsScalar.eps(-1)
