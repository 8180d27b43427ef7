"""
Decay profiles of smooth and rough symbols
==========================================

A trigonometric polynomial gives matrix elements that decay fast in w - z;
an iid rough symbol does not.  On Z_33 even the smooth case keeps a
Gaussian-width tail, since any window spreads over about sqrt(33) points.
"""

from tfpsi.phase import periodized_gaussian, tighten
from tfpsi.presets import rough, trig_poly
from tfpsi.seqalg import PhaseLattice
from tfpsi.symclass import hormander_profile

sys = tighten(periodized_gaussian(33), PhaseLattice(33, 3, 3))

for name, sigma in [("trig poly", trig_poly(33, 2, seed=7)), ("rough", rough(33, seed=1))]:
    prof = hormander_profile(sigma, sys.window)
    print(f"{name:10s} fitted decay {prof.rows[0].fit.s_hat:6.2f}, tail beyond 6: {prof.max_beyond(6):.3f}")
    for row in prof.rows:
        print(f"    C_{row.s:g} = {row.constant:.4g}")
