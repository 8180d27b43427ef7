"""Convolution-dominated matrices over a phase lattice.

A matrix indexed by pairs of lattice points is measured through its diagonal
envelope ``d_A(mu) = max_lambda |A[lambda, lambda - mu]|``; the algebra norm of
the envelope is the matrix norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import make_rng
from .seqalg import (
    AlgebraSpec,
    LatticeSeq,
    PhaseLattice,
    WeightSpec,
    algebra_norm,
    convolution_action_constant,
    convolve,
    sequence_norm,
)

__all__ = [
    "CDMatrix",
    "DecayFit",
    "ProductBoundReport",
    "ApplyReport",
    "FourierDiagonalReport",
    "envelope",
    "cda_norm",
    "envelope_product_bound",
    "apply",
    "pinv",
    "penrose_residuals",
    "decay_fit",
    "diagonal_fourier_check",
    "perturbed_identity",
]


def _envelope_values(entries: np.ndarray, lattice: PhaseLattice) -> np.ndarray:
    out = np.zeros(lattice.size)
    np.maximum.at(out, lattice.diff_index.ravel(), np.abs(entries).ravel())
    return out.reshape(lattice.shape)


class CDMatrix:
    """A matrix on ``lattice x lattice`` with its (eagerly computed) envelope."""

    def __init__(self, entries, lattice: PhaseLattice):
        a = np.array(entries, dtype=complex)
        if a.shape != (lattice.size, lattice.size):
            raise ValueError(f"entries of shape {a.shape} do not match lattice size {lattice.size}")
        a.setflags(write=False)
        self.entries = a
        self.lattice = lattice
        self.envelope = LatticeSeq(_envelope_values(a, lattice), lattice)

    @classmethod
    def identity(cls, lattice: PhaseLattice) -> "CDMatrix":
        return cls(np.eye(lattice.size), lattice)

    @classmethod
    def circulant(cls, a: LatticeSeq) -> "CDMatrix":
        """``A[lambda, mu] = a(lambda - mu)``."""
        return cls(a.flat[a.lattice.diff_index], a.lattice)

    def _check(self, other: "CDMatrix"):
        if other.lattice != self.lattice:
            raise ValueError("lattice mismatch")

    def __matmul__(self, other):
        if isinstance(other, CDMatrix):
            self._check(other)
            return CDMatrix(self.entries @ other.entries, self.lattice)
        return NotImplemented

    def adjoint(self) -> "CDMatrix":
        return CDMatrix(self.entries.conj().T, self.lattice)

    @property
    def shape(self):
        return self.entries.shape

    def __repr__(self):
        return f"CDMatrix(size={self.lattice.size}, lattice={self.lattice})"


def envelope(a: CDMatrix) -> LatticeSeq:
    return a.envelope


def cda_norm(a: CDMatrix, spec: AlgebraSpec) -> float:
    if a.lattice != spec.lattice:
        raise ValueError("matrix lattice does not match the algebra lattice")
    return algebra_norm(a.envelope, spec)


@dataclass(frozen=True)
class ProductBoundReport:
    max_violation: float
    scale: float


def envelope_product_bound(a: CDMatrix, b: CDMatrix) -> ProductBoundReport:
    """Measure ``max_mu (d_AB - d_A * d_B)(mu)``; should be ``<= 0`` up to rounding."""
    a._check(b)
    d_ab = (a @ b).envelope.real
    conv = convolve(a.envelope, b.envelope).real
    return ProductBoundReport(float(np.max(d_ab - conv)), float(np.max(conv)))


@dataclass(frozen=True)
class ApplyReport:
    lhs: float
    rhs: float
    constant: float
    ok: bool


def apply(a: CDMatrix, c: LatticeSeq, spec: AlgebraSpec, y_weight: WeightSpec | None = None,
          p: float | None = None, slack: float = 1e-12):
    """Return ``A c`` and check ``||A c||_Y <= K ||A||_C ||c||_Y``.

    ``Y`` is ``l^p`` with ``y_weight`` (defaults: the weight and exponent of
    ``spec``).  ``K`` is the exact action constant of the sequence algebra on
    ``Y``; it is 1 for the flat ``l^1`` algebra.
    """
    if c.lattice != a.lattice or spec.lattice != a.lattice:
        raise ValueError("lattice mismatch")
    y_weight = spec.weight if y_weight is None else y_weight
    p = spec.q if p is None else p
    out = LatticeSeq(a.entries @ c.flat, a.lattice)
    k = convolution_action_constant(spec, y_weight, p)
    lhs = sequence_norm(out, y_weight, p)
    rhs = k * cda_norm(a, spec) * sequence_norm(c, y_weight, p)
    return out, ApplyReport(lhs, rhs, k, lhs <= rhs * (1 + slack) + 1e-300)


def pinv(a: CDMatrix, rtol: float = 1e-10) -> CDMatrix:
    """Moore-Penrose pseudo-inverse through a full SVD.

    Singular values below ``rtol * s_max`` count as zero.
    """
    if not (0 < rtol <= 1e-2):
        raise ValueError("rtol must lie in (0, 1e-2]")
    u, s, vh = np.linalg.svd(a.entries)
    if s.size == 0 or s[0] == 0:
        return CDMatrix(np.zeros_like(a.entries), a.lattice)
    keep = s > rtol * s[0]
    inv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    return CDMatrix(inv, a.lattice)


def penrose_residuals(a: np.ndarray, x: np.ndarray) -> tuple[float, float, float, float]:
    """Relative residuals of the four Penrose identities for ``x = pinv(a)``."""
    na = np.linalg.norm(a)
    nx = np.linalg.norm(x)
    ax = a @ x
    xa = x @ a
    return (
        float(np.linalg.norm(ax @ a - a) / na),
        float(np.linalg.norm(xa @ x - x) / nx),
        float(np.linalg.norm(ax - ax.conj().T) / max(np.linalg.norm(ax), 1e-300)),
        float(np.linalg.norm(xa - xa.conj().T) / max(np.linalg.norm(xa), 1e-300)),
    )


@dataclass(frozen=True)
class DecayFit:
    s_hat: float
    c_hat: float
    residual: float
    points_used: int


def decay_fit(d: LatticeSeq, min_dist: float = 2.0) -> DecayFit:
    """Least-squares fit ``log d(mu) = log C - s log <mu>``.

    Only points with periodic length ``>= min_dist`` and ``d > 1e-300`` enter.
    """
    if min_dist < 1:
        raise ValueError("min_dist must be >= 1")
    vals = np.abs(d.values).ravel()
    r = d.lattice.radii.ravel()
    use = (r >= min_dist) & (vals > 1e-300)
    if use.sum() < 4:
        raise ValueError("insufficient support for a decay fit")
    x = np.log1p(r[use] ** 2) / 2
    y = np.log(vals[use])
    design = np.stack([np.ones_like(x), -x], axis=1)
    (logc, s), *_ = np.linalg.lstsq(design, y, rcond=None)
    res = y - design @ np.array([logc, s])
    return DecayFit(float(s), float(math.exp(logc)), float(np.sqrt(np.mean(res**2))), int(use.sum()))


@dataclass(frozen=True)
class FourierDiagonalReport:
    max_err: float
    n_coefficients: int


def diagonal_fourier_check(a: CDMatrix, t_samples: int) -> FourierDiagonalReport:
    """Recover side diagonals as Fourier coefficients of ``t -> M_t A M_-t``.

    ``M_t`` multiplies the entry at lattice coordinates ``k`` by
    ``exp(2 pi i k.t)`` with ``k`` taken in ``[0, shape)``.  The coefficients
    are computed by the rectangle rule on a ``t_samples x t_samples`` grid of
    the torus and compared with the diagonals ``{(k, l): k - l = n mod
    t_samples}``.
    """
    lat = a.lattice
    ka, kb = lat.shape
    if t_samples % ka or t_samples % kb:
        raise ValueError("t_samples must be a multiple of both lattice periods")
    idx = lat.indices
    t = np.arange(t_samples) / t_samples
    # phase_k(t) = exp(2 pi i k . t), separable in the two coordinates
    p1 = np.exp(2j * np.pi * np.outer(t, idx[:, 0]))  # (T, size)
    p2 = np.exp(2j * np.pi * np.outer(t, idx[:, 1]))
    ent = a.entries
    # f(t1, t2)[k, l] = a_kl * phase_k(t) * conj(phase_l(t))
    f = (p1[:, None, :, None] * p2[None, :, :, None]) * ent[None, None] \
        * np.conj(p1[:, None, None, :] * p2[None, :, None, :])
    coeffs = np.fft.fft2(f, axes=(0, 1)) / t_samples**2  # integral of f(t) e^{-2 pi i n.t}
    dk = (idx[:, None, 0] - idx[None, :, 0]) % t_samples
    dl = (idx[:, None, 1] - idx[None, :, 1]) % t_samples
    expected = np.zeros_like(coeffs)
    rows, cols = np.indices(ent.shape)
    expected[dk, dl, rows, cols] = ent
    return FourierDiagonalReport(float(np.abs(coeffs - expected).max()), t_samples * t_samples)


def perturbed_identity(lattice: PhaseLattice, amplitude: float = 0.1, s: float = 4.0,
                       seed: int = 0) -> CDMatrix:
    """``I + K`` with ``|K[lambda, mu]| <= amplitude <lambda - mu>^-s`` and seeded phases and moduli."""
    rng = make_rng(seed)
    size = lattice.size
    bound = amplitude * (1 + lattice.radii.ravel() ** 2) ** (-s / 2)
    mod = rng.uniform(0.0, 1.0, (size, size))
    phase = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, (size, size)))
    k = bound[lattice.diff_index] * mod * phase
    return CDMatrix(np.eye(size) + k, lattice)
