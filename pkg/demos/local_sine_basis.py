"""
Local sine bases on the circle
==============================

Four bells of length 1 on a circle of length 4, sampled at 2048 points.
The sine atoms are orthonormal, split exactly into two shifted and
modulated exponential bells, and a smooth multiplier is almost diagonal.
"""

import numpy as np

from tfpsi.molecules import (
    BellSpec,
    bell_partition_error,
    kompost_decompose,
    local_sine_basis,
    sine_basis_almost_diag,
)

spec = BellSpec.on_circle(alpha=1.0, epsilon=0.25, smoothness=3, bells=4, points=2048)
print("sum of squared bells - 1:", bell_partition_error(spec, 4))

basis = local_sine_basis(spec, 4, 15)
gram = basis.gram()
print("Gram - I:", np.abs(gram - np.eye(len(gram))).max())
print("splitting error, worst atom:",
      max(kompost_decompose(spec, k, l, 4).max_point_err for k in range(4) for l in range(16)))

tab = sine_basis_almost_diag(lambda t, w: np.cos(2 * np.pi * t / 4) + 0 * w, spec, 4, 15)
for s, c in tab.rows():
    print(f"C_{s:g} = {c:.6f}")
