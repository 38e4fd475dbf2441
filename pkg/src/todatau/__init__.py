"""Tau-structures, matrix resolvents and wave-function pairs of the Toda lattice."""

from .exact import EpsScalar, LatticePoly, Rational, antidifference, shift_n
from .ring import AdmissibleDerivation, TodaPoly, apply_derivation, lax_derivation_images, substitute_initial
from .series import BiKernel, TruncSeries, TruncationError, cyclic_sum, expand_pole, series_exp, series_invert
from .resolvent import ALGEBRA, lattice_ring, mr_compute, verify_defining, verify_gradient_identity, kernel_K
from .tau import (correlators_kernel, correlators_mr, omega_multi, tau_tables, toda_derivation,
                  verify_commutativity, verify_tau_axioms)
from .wave import build_pair, correlators_wave, reduced_kernel, yz_recursion
from .applications import (gue_correlators, gue_kernel_closed, gue_wick_oracle, gw_correlators,
                           gw_kernel_check, verify_binomial_identities)
from .prewave import (CPoly, cring_shift, prewave_compute, prewave_correlators, reduce_monomial,
                      s_operator, verify_AB_formulas, verify_dpre_pair, verify_projector_entries)

__version__ = "0.1.0"
