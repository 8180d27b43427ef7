"""
Inverting a Weyl operator through its Gabor matrix
==================================================

The inverse of sigma^w is again a Weyl operator tau^w, and M(tau) is the
pseudo-inverse of M(sigma).  Off-diagonal decay survives the inversion.
"""

import math

from tfpsi.aldiag import invert_symbol, spectral_invariance_experiment
from tfpsi.cdmat import decay_fit, perturbed_identity, pinv
from tfpsi.phase import periodized_gaussian, tighten
from tfpsi.presets import bump
from tfpsi.seqalg import AlgebraSpec, PhaseLattice, WeightSpec

lat = PhaseLattice(33, 3, 3)
sys = tighten(periodized_gaussian(33), lat)

for amp in (0.1, 0.3, 0.6):
    tau, rep = invert_symbol(1 + amp * bump(33), sys)
    print(f"amplitude {amp}: pinv match {rep.pinv_match_frob:.1e}, "
          f"decay {rep.decay_sigma.s_hat:.2f} -> {rep.decay_tau.s_hat:.2f}")

spec = AlgebraSpec(WeightSpec.polynomial(3), math.inf, lat)
rep = spectral_invariance_experiment(1 + 0.3 * bump(33), sys, spec, math.inf, WeightSpec.polynomial(2))
print("tau^w sigma^w f = f, worst weighted residual:", rep.residual)

# a synthetic convolution-dominated matrix with <.>^-4 off-diagonal decay
a = perturbed_identity(lat, amplitude=0.1, s=4.0, seed=0)
print("decay of A:", decay_fit((a @ a.adjoint()).envelope).s_hat, "inverse:", decay_fit(pinv(a).envelope).s_hat)
