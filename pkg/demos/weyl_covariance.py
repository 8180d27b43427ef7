"""
Weyl operators and the covariance identity
==========================================

Matrix elements of a Weyl operator against time-frequency shifts of g are,
up to the factor 1/N, samples of the STFT of the symbol with window W(g, g).
"""

import numpy as np

from tfpsi.phase import magic_formula_check, periodized_gaussian, wigner
from tfpsi.presets import random_bandlimited
from tfpsi.weyl import covariance_check, dequantize, quantize, readback_check

n = 15
sigma = random_bandlimited(n, 3.0, seed=1)
g = periodized_gaussian(n)

op = quantize(sigma)
print("round trip symbol -> operator -> symbol:", np.abs(dequantize(op) - sigma).max())

f = np.roll(g, 3)
print("rank one operator dequantizes to W(f, g):",
      np.abs(dequantize(np.outer(f, g.conj())) - wigner(f, g)).max())

rep = covariance_check(sigma, g)
print(f"{rep.pairs} pairs, constant {rep.constant:.4f}, max rel err {rep.max_rel_err:.1e}")
print("read-back from matrix elements:", readback_check(sigma, g))

# the same bookkeeping for sigma = W(g, g) with a Gaussian window
print("magic formula error:", magic_formula_check(g).max_rel_err)
