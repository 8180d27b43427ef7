"""
Weighted sequence algebras on a finite lattice
==============================================

Convolution constants of weighted l^1 and l^inf, the GRS profile of a
polynomial weight and the Fourier picture of a convolution-dominated matrix.
"""

import math

import numpy as np

from tfpsi.cdmat import CDMatrix, diagonal_fourier_check
from tfpsi.seqalg import AlgebraSpec, PhaseLattice, WeightSpec, check_algebra_weight, grs_profile, l1_maximality_check

lat = PhaseLattice(33, 3, 3)
for w, q in [(WeightSpec.flat(), 1), (WeightSpec.polynomial(2), 1), (WeightSpec.polynomial(3), math.inf)]:
    rep = check_algebra_weight(AlgebraSpec(w, q, lat))
    print(f"{w.kind:10s} s={w.s:g} q={q}: constant {rep.worst_ratio:.3f}")

prof = grs_profile(WeightSpec.polynomial(3), (1, 0), 50)
print("omega(n lam)^(1/n), last five:", np.round(prof[-5:], 4))

print("sup |F|a|| vs ||a||_1:", l1_maximality_check([1, -2, 0.5j, 3], 4096))

rng = np.random.default_rng(0)
m = CDMatrix(rng.standard_normal((lat.size, lat.size)), lat)
print("diagonals as Fourier coefficients:", diagonal_fourier_check(m, 11).max_err)
