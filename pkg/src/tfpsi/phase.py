"""Time-frequency analysis on the cyclic group ``Z_N`` (``N`` odd).

Conventions
-----------
* ``pi(x, xi) f(t) = exp(2 pi i xi t / N) f(t - x)``
* ``<f, g> = sum_t f(t) conj(g(t))`` (no normalisation)
* ``V_g f(x, xi) = <f, pi(x, xi) g>``
* ``W(f, g)(x, xi) = sum_t f(x + h t) conj(g(x - h t)) exp(-2 pi i t xi / N)``
  with ``h = 2^{-1} mod N``.

Signals are 1-D complex arrays of length ``N``; symbols are ``N x N`` arrays
indexed ``[x, xi]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .seqalg import LatticeSeq, PhaseLattice, periodic_abs

__all__ = [
    "half",
    "check_odd",
    "j_map",
    "periodized_gaussian",
    "tf_shift",
    "tf_atoms",
    "stft",
    "stft2",
    "wigner",
    "frame_operator",
    "GaborSystem",
    "tighten",
    "analysis",
    "synthesis",
    "MagicReport",
    "magic_formula_check",
    "pointwise_domination",
]

TIGHT_TOL = 1e-10


def check_odd(n: int) -> int:
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise ValueError(f"N must be an odd positive integer, got {n}")
    return n


def half(n: int) -> int:
    """The inverse of 2 modulo odd ``n``."""
    return (check_odd(n) + 1) // 2


def j_map(zeta, n: int) -> np.ndarray:
    """``j(z1, z2) = (z2, -z1)`` reduced mod ``n``; works on ``(..., 2)`` arrays."""
    z = np.asarray(zeta)
    return np.stack([z[..., 1] % n, (-z[..., 0]) % n], axis=-1)


def periodized_gaussian(n: int, terms: int = 6) -> np.ndarray:
    """``sum_m exp(-pi ((t + m n) / sqrt(n))^2)``, invariant under the DFT up to scale."""
    n = check_odd(n)
    t = np.arange(n)
    m = np.arange(-terms, terms + 1)[:, None]
    return np.exp(-np.pi * ((t + m * n) / np.sqrt(n)) ** 2).sum(axis=0).astype(complex)


def _as_signal(f, n: int | None = None) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1:
        raise ValueError("a signal must be one-dimensional")
    if n is not None and f.size != n:
        raise ValueError(f"signal length {f.size} does not match N={n}")
    return f


def tf_shift(z, f) -> np.ndarray:
    """Apply the time-frequency shift ``pi(z)`` to ``f``."""
    f = _as_signal(f)
    n = f.size
    x, xi = int(z[0]), int(z[1])
    t = np.arange(n)
    return np.exp(2j * np.pi * ((xi * t) % n) / n) * np.roll(f, x)


def tf_atoms(g, points) -> np.ndarray:
    """Matrix whose columns are ``pi(p) g`` for the given points, shape (N, len(points))."""
    g = _as_signal(g)
    n = g.size
    pts = np.asarray(points).reshape(-1, 2)
    t = np.arange(n)
    rolled = g[(t[:, None] - pts[None, :, 0]) % n]
    return np.exp(2j * np.pi * ((t[:, None] * pts[None, :, 1]) % n) / n) * rolled


def stft(f, g) -> np.ndarray:
    """``V_g f`` as an ``N x N`` array indexed ``[x, xi]``."""
    f = _as_signal(f)
    g = _as_signal(g, f.size)
    if not np.any(g):
        raise ValueError("degenerate window")
    n = f.size
    t = np.arange(n)
    shifted = g[(t[None, :] - t[:, None]) % n]  # [x, t] -> g(t - x)
    return np.fft.fft(f[None, :] * np.conj(shifted), axis=1)


def stft2(sigma, phi) -> np.ndarray:
    """STFT of a symbol with a symbol window, indexed ``[z1, z2, zeta1, zeta2]``.

    ``V_Phi sigma(z, zeta) = sum_u sigma(u) conj(Phi(u - z)) exp(-2 pi i zeta.u / N)``.
    """
    sigma = np.asarray(sigma, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    n = sigma.shape[0]
    if sigma.shape != (n, n) or phi.shape != (n, n):
        raise ValueError("symbol and window must both be N x N")
    if not np.any(phi):
        raise ValueError("degenerate window")
    u = np.arange(n)
    d = (u[None, :] - u[:, None]) % n  # [z, u] -> u - z
    shifted = np.conj(phi)[d[:, None, :, None], d[None, :, None, :]]  # [z1, z2, u1, u2]
    return np.fft.fft2(sigma[None, None] * shifted, axes=(2, 3))


def wigner(f, g) -> np.ndarray:
    """Cross-Wigner distribution ``W(f, g)`` on ``Z_N x Z_N``."""
    f = _as_signal(f)
    g = _as_signal(g, f.size)
    n = f.size
    h = half(n)
    x = np.arange(n)[:, None]
    t = np.arange(n)[None, :]
    prod = f[(x + h * t) % n] * np.conj(g[(x - h * t) % n])
    return np.fft.fft(prod, axis=1)


def frame_operator(g, lattice: PhaseLattice) -> np.ndarray:
    """``S = sum_lambda (pi(lambda) g)(pi(lambda) g)^H``."""
    g = _as_signal(g, lattice.n)
    atoms = tf_atoms(g, lattice.points)
    return atoms @ atoms.conj().T


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """A window together with a lattice and its frame operator."""

    window: np.ndarray
    lattice: PhaseLattice
    frame_op: np.ndarray
    tight: bool

    @classmethod
    def from_window(cls, g, lattice: PhaseLattice) -> "GaborSystem":
        g = np.array(_as_signal(g, lattice.n))
        g.setflags(write=False)
        s = frame_operator(g, lattice)
        s.setflags(write=False)
        return cls(g, lattice, s, _is_identity(s))

    @property
    def n(self) -> int:
        return self.lattice.n

    @cached_property
    def atoms(self) -> np.ndarray:
        """``pi(lambda) g`` as columns, in lattice enumeration order."""
        a = tf_atoms(self.window, self.lattice.points)
        a.setflags(write=False)
        return a

    @cached_property
    def range_projector(self) -> np.ndarray:
        """Orthogonal projector of ``l^2(lattice)`` onto the analysis range (tight case)."""
        a = self.atoms
        return a.conj().T @ a

    def to_dict(self) -> dict:
        lat = self.lattice
        return {"n": lat.n, "alpha": lat.alpha, "beta": lat.beta, "tight": bool(self.tight)}


def _is_identity(s: np.ndarray) -> bool:
    return bool(np.abs(s - np.eye(s.shape[0])).max() <= TIGHT_TOL)


def tighten(g, lattice: PhaseLattice) -> GaborSystem:
    """Canonical tight window ``S^{-1/2} g``.

    Raises ``ValueError`` when ``g`` does not generate a frame on ``lattice``.
    """
    s = frame_operator(g, lattice)
    evals, evecs = np.linalg.eigh(s)
    if evals[-1] <= 0 or evals[0] <= 1e-12 * evals[-1]:
        raise ValueError("window does not generate a frame on this lattice")
    root_inv = (evecs / np.sqrt(evals)) @ evecs.conj().T
    sys = GaborSystem.from_window(root_inv @ np.asarray(g, complex), lattice)
    if not sys.tight:
        raise ArithmeticError("tightening failed to reach the identity frame operator")
    return sys


def analysis(sys: GaborSystem, f) -> LatticeSeq:
    """Gabor coefficients ``c(lambda) = <f, pi(lambda) g>``."""
    f = _as_signal(f, sys.n)
    return LatticeSeq(sys.atoms.conj().T @ f, sys.lattice)


def synthesis(sys: GaborSystem, c: LatticeSeq) -> np.ndarray:
    """``sum_lambda c(lambda) pi(lambda) g``."""
    if c.lattice != sys.lattice:
        raise ValueError("lattice mismatch")
    return sys.atoms @ c.flat


@dataclass(frozen=True)
class MagicReport:
    max_rel_err: float
    constant: float


def magic_formula_check(g, phi=None) -> MagicReport:
    """Check ``|V_{W(phi,phi)} W(g,g)(z, zeta)| = N |V_phi g(z + h j(zeta))| |V_phi g(z - h j(zeta))|``.

    Both sides are evaluated on the whole ``(z, zeta)`` grid; the error is
    relative to the largest value of the left side.  ``phi`` defaults to the
    periodized Gaussian.
    """
    g = _as_signal(g)
    n = check_odd(g.size)
    h = half(n)
    phi = periodized_gaussian(n) if phi is None else _as_signal(phi, n)
    lhs = np.abs(stft2(wigner(g, g), wigner(phi, phi)))
    v = np.abs(stft(g, phi))
    x = np.arange(n)
    z1, z2, c1, c2 = np.meshgrid(x, x, x, x, indexing="ij")
    jz1, jz2 = c2, -c1
    rhs = n * v[(z1 + h * jz1) % n, (z2 + h * jz2) % n] * v[(z1 - h * jz1) % n, (z2 - h * jz2) % n]
    scale = lhs.max()
    err = float(np.abs(lhs - rhs).max() / scale) if scale > 0 else 0.0
    return MagicReport(err, float(n))


def pointwise_domination(f, g, h, k, sharp: bool = False) -> float:
    """Worst violation of ``|V_h f| <= |<k,g>|^-1 (|V_g f| * |V_h k|)`` relative to the right side.

    The convolution is the cyclic one on ``Z_N x Z_N``.  Returns
    ``max(|V_h f| - rhs) / max(rhs)``; a non-positive value means the estimate
    holds everywhere.  With ``sharp=True`` the right side carries the extra
    factor ``1/N`` coming from the finite inversion formula
    ``sum_z V_g f(z) pi(z) k = N <k, g> f``, and the estimate still holds.
    """
    f = _as_signal(f)
    kg = np.vdot(g, k)  # <k, g>
    if abs(kg) == 0:
        raise ValueError("<k, g> must be non-zero")
    a = np.abs(stft(f, g))
    b = np.abs(stft(k, h))
    conv = np.real(np.fft.ifft2(np.fft.fft2(a) * np.fft.fft2(b))) / abs(kg)
    if sharp:
        conv /= f.size
    lhs = np.abs(stft(f, h))
    return float(np.max(lhs - conv) / np.max(conv))


def periodic_length(zeta, n: int) -> np.ndarray:
    z = np.asarray(zeta)
    return np.hypot(periodic_abs(z[..., 0], n), periodic_abs(z[..., 1], n))
