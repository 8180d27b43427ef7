"""Stock symbols and windows used by the experiments and tests."""

from __future__ import annotations

import numpy as np

from ._rng import complex_normal, make_rng
from .phase import check_odd, periodized_gaussian, wigner

__all__ = [
    "constant_symbol",
    "bump",
    "bump_symbol",
    "trig_poly",
    "random_bandlimited",
    "rough",
    "default_symbol_window",
    "make_symbol",
]


def constant_symbol(n: int, value: complex = 1.0) -> np.ndarray:
    return np.full((check_odd(n), n), value, dtype=complex)


def bump(n: int) -> np.ndarray:
    """Real periodized Gaussian bump on ``Z_n^2`` with peak value 1."""
    phi = periodized_gaussian(n).real
    b = np.outer(phi, phi)
    return (b / b.max()).astype(complex)


def bump_symbol(n: int, amplitude: float = 0.3) -> np.ndarray:
    """``1 + amplitude * bump``."""
    return 1.0 + amplitude * bump(n)


def _fourier_synth(n: int, coeff_mask: np.ndarray, seed: int) -> np.ndarray:
    rng = make_rng(seed)
    coeffs = np.where(coeff_mask, complex_normal(rng, (n, n)), 0.0)
    coeffs /= np.sqrt(max(int(coeff_mask.sum()), 1))
    return np.fft.ifft2(coeffs) * n * n


def trig_poly(n: int, degree: int = 2, seed: int = 0) -> np.ndarray:
    """``sum_{|a|,|b| <= degree} c_ab exp(2 pi i (a x + b xi) / n)`` with seeded coefficients."""
    n = check_odd(n)
    f = np.fft.fftfreq(n, 1.0 / n)
    mask = (np.abs(f)[:, None] <= degree) & (np.abs(f)[None, :] <= degree)
    return _fourier_synth(n, mask, seed)


def random_bandlimited(n: int, bandwidth: float = 3.0, seed: int = 0) -> np.ndarray:
    """Random symbol whose DFT is supported in the periodic disc of radius ``bandwidth``."""
    n = check_odd(n)
    f = np.fft.fftfreq(n, 1.0 / n)
    mask = np.hypot(f[:, None], f[None, :]) <= bandwidth
    return _fourier_synth(n, mask, seed)


def rough(n: int, seed: int = 0) -> np.ndarray:
    """I.i.d. complex Gaussian entries."""
    return complex_normal(make_rng(seed), (check_odd(n), n))


def default_symbol_window(n: int) -> np.ndarray:
    """``W(phi, phi)`` for the periodized Gaussian ``phi``: a Gaussian on ``Z_n^2``."""
    phi = periodized_gaussian(n)
    return wigner(phi, phi)


def make_symbol(n: int, preset: str, **kw) -> np.ndarray:
    """Dispatch on a preset name (``constant``, ``bump``, ``trigPoly``, ...)."""
    seed = int(kw.get("seed", 0))
    if preset == "constant":
        return constant_symbol(n, kw.get("value", 1.0))
    if preset == "bump":
        return bump_symbol(n, float(kw.get("amplitude", 0.3)))
    if preset == "trigPoly":
        return trig_poly(n, int(kw.get("degree", 2)), seed)
    if preset == "randomBandlimited":
        return random_bandlimited(n, float(kw.get("bandwidth", 3.0)), seed)
    if preset == "rough":
        return rough(n, seed)
    raise ValueError(f"unknown symbol preset {preset!r}")
