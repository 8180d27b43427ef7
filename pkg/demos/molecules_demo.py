"""
Time-frequency molecules
========================

Jittered, reshaped copies of Gaussians still have Gabor coefficients that
decay away from their nominal lattice point, and Weyl operators stay almost
diagonal between two such families.
"""

import math

import numpy as np

from tfpsi.molecules import envelope_decay, make_molecules, molecule_almost_diag
from tfpsi.phase import periodized_gaussian, tighten
from tfpsi.presets import bump
from tfpsi.seqalg import PhaseLattice, periodic_abs

lat = PhaseLattice(33, 3, 3)
sys = tighten(periodized_gaussian(33), lat)

fam_e = make_molecules(sys, jitter_bound=1.5, s=4.0, seed=1)
fam_f = make_molecules(sys, jitter_bound=1.5, s=4.0, seed=2)
print("stored bound holds:", fam_e.bound_excess() <= 0)
print("centred constant C'' for s=4:", fam_e.centred_constant(4.0))

rep = molecule_almost_diag(1 + 0.3 * bump(33), fam_e, fam_f)
print("almost diagonal against a' * a^* * h:", rep.ok, f"(excess {rep.max_excess:.2e})")

# the fitted decay barely depends on the reference window
d = periodic_abs(np.arange(33), 33)
wide = tighten(np.exp(-np.pi * (d / (1.25 * math.sqrt(33))) ** 2), lat)
print("decay vs reference window:", envelope_decay(fam_e).s_hat, "vs wider window:",
      envelope_decay(fam_e, wide).s_hat)
