import pytest

from todatau.exact import LatticePoly
from todatau.resolvent import (kernel_K, lattice_ring, mr_compute, verify_alpha_relations,
                               verify_defining, verify_gradient_identity, verify_K_subtractions)
from todatau.ring import substitute_initial

from reference_values import P, R_FIRST


def test_first_coefficients():
    r = mr_compute(3)
    for power, block in enumerate(R_FIRST):
        m = r.matrix_coefficient(power)
        assert list(m.e) == [P(block[0][0]), P(block[0][1]), P(block[1][0]), P(block[1][1])], power


def test_defining_equations_hold():
    rep = verify_defining(mr_compute(10))
    assert rep.passed, rep.to_text()
    assert rep.first_failure is None


@pytest.mark.parametrize("bad", ["w_0 + 1", "w_0*v_0"])
def test_corrupted_coefficient_is_located(bad):
    rep = verify_defining(mr_compute(8).with_a(1, P(bad)))
    assert not rep.passed
    assert rep.first_failure == 1


def test_order_zero_passes():
    assert verify_defining(mr_compute(0)).passed


def test_alpha_relations():
    rep = verify_alpha_relations(mr_compute(10))
    assert rep.passed, rep.to_text()


def test_gradient_identity():
    rep = verify_gradient_identity(mr_compute(13), (6, 6))
    assert rep.passed, rep.to_text()


def test_kernel_subtractions():
    rep = verify_K_subtractions(mr_compute(8))
    assert rep.passed, rep.to_text()


def test_kernel_pole_is_one_plus_alpha():
    r = mr_compute(6)
    K = kernel_K(r)
    assert K.pole.first_difference(r.one_plus_alpha(), 6) is None


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        mr_compute(-1)


def test_lattice_ring_is_the_image_of_the_algebra():
    n = LatticePoly.n()
    f, g = n * n - 1, n + 2
    ra, rl = mr_compute(6), mr_compute(6, lattice_ring(f, g))
    for i in range(7):
        assert substitute_initial(ra.a[i], f, g) == rl.a[i]
        assert substitute_initial(ra.b[i], f, g) == rl.b[i]
        assert substitute_initial(ra.c[i], f, g) == rl.c[i]
