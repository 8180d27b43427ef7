"""Finite Weyl calculus on ``Z_N`` (``N`` odd).

``quantize`` implements

    (sigma^w f)(x) = 1/N sum_{y, xi} sigma(h(x+y), xi) exp(2 pi i (x-y) xi / N) f(y)

so that ``sigma = 1`` gives the identity and ``<sigma^w f, g> = <sigma, W(g, f)> / N``.
Operators are plain ``N x N`` complex arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import make_rng
from .phase import half, stft2, tf_atoms, wigner

__all__ = [
    "covariance_constant",
    "quantize",
    "dequantize",
    "weyl_pairing",
    "twisted_product",
    "CovarianceReport",
    "full_matrix_elements",
    "covariance_check",
    "readback_check",
]


def covariance_constant(n: int) -> float:
    """Factor ``c`` in ``|<sigma^w pi(z) g, pi(w) g>| = c |V_Phi sigma(h(w+z), j(w-z))|``.

    Measured once for these conventions and pinned by a regression test: 1/N.
    """
    return 1.0 / n


def _as_square(a, what="symbol") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be a square N x N array")
    half(a.shape[0])  # N odd
    return a


def _antidiagonal_index(n: int):
    h = half(n)
    x = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    return (h * (x + y)) % n, (x - y) % n


def quantize(sigma) -> np.ndarray:
    """Weyl operator of a symbol, as an ``N x N`` matrix."""
    sigma = _as_square(sigma)
    n = sigma.shape[0]
    partial = np.fft.ifft(sigma, axis=1)  # [m, k] = 1/N sum_xi sigma(m, xi) e^{2 pi i k xi/N}
    mid, diff = _antidiagonal_index(n)
    return partial[mid, diff]


def dequantize(op) -> np.ndarray:
    """Inverse of :func:`quantize`.

    The kernel entry ``K[m + h k, m - h k]`` is the partial inverse DFT of
    ``sigma(m, .)`` at ``k``; a forward DFT over ``k`` recovers the symbol.
    """
    op = _as_square(op, "operator")
    n = op.shape[0]
    h = half(n)
    m = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    partial = op[(m + h * k) % n, (m - h * k) % n]
    return np.fft.fft(partial, axis=1)


def weyl_pairing(sigma, f, g) -> complex:
    """``<sigma, W(g, f)> / N``, equal to ``<sigma^w f, g>``."""
    sigma = _as_square(sigma)
    return complex(np.vdot(wigner(g, f), sigma) / sigma.shape[0])


def twisted_product(sigma, tau) -> np.ndarray:
    """Symbol of ``sigma^w tau^w``, by composition and dequantization."""
    return dequantize(quantize(sigma) @ quantize(tau))


def full_matrix_elements(sigma, g) -> np.ndarray:
    """``E[w, z] = <sigma^w pi(z) g, pi(w) g>`` for all ``w, z`` in ``Z_N^2``.

    Phase-space points are flattened as ``x * N + xi``.
    """
    sigma = _as_square(sigma)
    n = sigma.shape[0]
    x = np.arange(n)
    pts = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)
    atoms = tf_atoms(g, pts)
    return atoms.conj().T @ quantize(sigma) @ atoms


@dataclass(frozen=True)
class CovarianceReport:
    max_rel_err: float
    constant: float
    pairs: int


def covariance_check(sigma, g, max_pairs: int | None = None, seed: int = 0) -> CovarianceReport:
    """Compare Gabor-type matrix elements with the STFT of the symbol.

    Checks ``|<sigma^w pi(z) g, pi(w) g>| = c |V_Phi sigma(h(w+z), j(w-z))|`` with
    ``Phi = W(g, g)`` and ``c = 1/N``.  All ``N^4`` pairs are used unless
    ``max_pairs`` is smaller, in which case a seeded sample is drawn.
    """
    sigma = _as_square(sigma)
    n = sigma.shape[0]
    h = half(n)
    g = np.asarray(g, dtype=complex)
    if not np.any(g):
        raise ValueError("degenerate window")
    lhs = np.abs(full_matrix_elements(sigma, g))  # [w, z]
    v = np.abs(stft2(sigma, wigner(g, g)))
    total = n**4
    w_idx, z_idx = np.divmod(np.arange(total), n * n)
    if max_pairs is not None and max_pairs < total:
        pick = make_rng(seed).choice(total, size=max_pairs, replace=False)
        w_idx, z_idx = w_idx[pick], z_idx[pick]
    w = np.stack(np.divmod(w_idx, n), axis=-1)
    z = np.stack(np.divmod(z_idx, n), axis=-1)
    u = (h * (w + z)) % n
    d = (w - z) % n
    rhs = covariance_constant(n) * v[u[:, 0], u[:, 1], d[:, 1], (-d[:, 0]) % n]
    got = lhs[w_idx, z_idx]
    scale = max(rhs.max(), got.max())
    err = float(np.abs(got - rhs).max() / scale) if scale > 0 else 0.0
    return CovarianceReport(err, covariance_constant(n), int(w_idx.size))


def readback_check(sigma, g) -> float:
    """Recover ``|V_Phi sigma(u, v)|`` from matrix elements at ``u -+ h j^{-1}(v)``.

    Returns the maximum relative deviation from :func:`stft2` over the grid.
    """
    sigma = _as_square(sigma)
    n = sigma.shape[0]
    h = half(n)
    elems = np.abs(full_matrix_elements(sigma, g))
    v_true = np.abs(stft2(sigma, wigner(g, g)))
    x = np.arange(n)
    u1, u2, v1, v2 = np.meshgrid(x, x, x, x, indexing="ij")
    # j^{-1}(v1, v2) = (-v2, v1)
    ji1, ji2 = -v2, v1
    z = (((u1 - h * ji1) % n) * n + (u2 - h * ji2) % n)
    w = (((u1 + h * ji1) % n) * n + (u2 + h * ji2) % n)
    recovered = elems[w, z] / covariance_constant(n)
    scale = v_true.max()
    return float(np.abs(recovered - v_true).max() / scale) if scale > 0 else 0.0
