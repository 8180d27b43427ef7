"""
Almost diagonalization in a generalized Sjostrand class
=======================================================

For a symbol sigma the Gabor matrix M(sigma) is dominated by a sequence h
along its diagonals, and h in turn yields a function H on the phase plane
that dominates every matrix element.  The two norms are equivalent.
"""

import math

from tfpsi.aldiag import aldia_chain_check, constructive_lower_constant, norm_equivalence_check
from tfpsi.phase import periodized_gaussian, tighten
from tfpsi.presets import random_bandlimited
from tfpsi.seqalg import AlgebraSpec, PhaseLattice, WeightSpec

lat = PhaseLattice(33, 3, 3)
sys = tighten(periodized_gaussian(33), lat)
specs = {
    "l1, flat": AlgebraSpec(WeightSpec.flat(), 1, lat),
    "linf, <.>^3": AlgebraSpec(WeightSpec.polynomial(3), math.inf, lat),
}

sigma = random_bandlimited(33, 3.0, seed=3)
for name, spec in specs.items():
    chain = aldia_chain_check(sigma, sys, spec)
    eq = norm_equivalence_check(sigma, sys, spec)
    print(f"[{name}]")
    print(f"  excesses (<= 0 means dominated): {chain.grand_symbol_excess:.2e} "
          f"{chain.envelope_excess:.2e} {chain.dominating_excess:.2e}")
    print(f"  ||H||_W(A) = {chain.amalgam_norm_H:.3f} <= {chain.norm_bound:.3f} (K = {chain.algebra_constant:.3f})")
    print(f"  ||M|| / ||sigma|| = {eq.c_lower:.4f}, constructive lower constant {constructive_lower_constant(sys, spec):.2e}")
