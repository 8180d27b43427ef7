"""
Tight Gabor frames on Z_33
==========================

Build the canonical tight window from a periodized Gaussian, then check that
analysis preserves energy and synthesis undoes analysis.
"""

import numpy as np

from tfpsi._rng import complex_normal, make_rng
from tfpsi.phase import analysis, frame_operator, periodized_gaussian, synthesis, tighten
from tfpsi.seqalg import PhaseLattice

# A 3 x 3 step lattice has 121 points, redundancy 121/33
lat = PhaseLattice(33, 3, 3)
g = periodized_gaussian(33)
s = frame_operator(g, lat)
ev = np.linalg.eigvalsh(s)
print(f"frame bounds of the raw Gaussian: {ev[0]:.4f} .. {ev[-1]:.4f}")

sys = tighten(g, lat)
print("tight after S^-1/2:", sys.tight)

f = complex_normal(make_rng(0), 33)
c = analysis(sys, f)
print("||c||^2 - ||f||^2 =", np.vdot(c.flat, c.flat).real - np.vdot(f, f).real)
print("reconstruction error:", np.linalg.norm(synthesis(sys, c) - f))

# delta_0 is a frame only if the time steps reach every position
try:
    tighten(np.eye(33)[0], PhaseLattice(33, 3, 1))
except ValueError as exc:
    print("delta on alpha=3:", exc)
print("delta on alpha=1 tight:", tighten(np.eye(33)[0], PhaseLattice(33, 1, 3)).tight)
