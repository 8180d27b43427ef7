"""Symbol classes: grand symbol, amalgam norms, Sjostrand and modulation norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cdmat import DecayFit, decay_fit
from .phase import stft2, wigner
from .presets import default_symbol_window
from .seqalg import AlgebraSpec, LatticeSeq, PhaseLattice, WeightSpec, algebra_norm
from .weyl import full_matrix_elements

__all__ = [
    "GrandSymbol",
    "ClassNormReport",
    "HormanderRow",
    "HormanderProfile",
    "grand_symbol",
    "compose_j",
    "local_suprema",
    "amalgam_norm",
    "sjostrand_norm",
    "modspace_norm",
    "window_independence_check",
    "hormander_profile",
]


@dataclass(frozen=True, eq=False)
class GrandSymbol:
    values: np.ndarray
    window_id: str = "custom"


def grand_symbol(sigma, phi, window_id: str = "custom") -> GrandSymbol:
    """``G(sigma)(zeta) = max_z |V_Phi sigma(z, zeta)|``."""
    v = np.abs(stft2(sigma, phi))
    return GrandSymbol(v.max(axis=(0, 1)), window_id)


def compose_j(values: np.ndarray) -> np.ndarray:
    """``(F o j)(zeta) = F(zeta_2, -zeta_1)`` on ``Z_N^2``."""
    n = values.shape[0]
    x = np.arange(n)
    return values[x[None, :], (-x[:, None]) % n]


def local_suprema(F, lattice: PhaseLattice) -> LatticeSeq:
    """``a(lambda) = max over lambda + box of F``."""
    F = np.asarray(F, dtype=float)
    if F.shape != (lattice.n, lattice.n):
        raise ValueError("F must live on the full N x N grid")
    out = np.full(lattice.size, -np.inf)
    np.maximum.at(out, lattice.cell_labels().ravel(), F.ravel())
    return LatticeSeq(out.reshape(lattice.shape), lattice)


def amalgam_norm(F, lattice: PhaseLattice, spec: AlgebraSpec) -> float:
    """``W(A)`` norm: algebra norm of the local suprema over the lattice cells."""
    if spec.lattice != lattice:
        raise ValueError("spec lattice differs from the amalgam lattice")
    return algebra_norm(local_suprema(F, lattice), spec)


@dataclass(frozen=True)
class ClassNormReport:
    sjostrand_norm: float
    q: float
    spec: AlgebraSpec = field(repr=False)
    member: bool

    def to_dict(self) -> dict:
        return {
            "sjostrandNorm": self.sjostrand_norm,
            "q": "inf" if math.isinf(self.q) else 1,
            "spec": self.spec.to_dict(),
            "member": self.member,
        }


def sjostrand_norm(sigma, g, spec: AlgebraSpec, threshold: float = math.inf) -> ClassNormReport:
    """Generalized Sjostrand norm ``||G(sigma) o j||_{W(A)}`` with window ``Phi = W(g, g)``.

    On a finite grid every symbol has a finite norm; ``member`` only records
    whether it stays below ``threshold``.
    """
    phi = wigner(g, g)
    if not np.any(phi):
        raise ValueError("degenerate window")
    gs = grand_symbol(sigma, phi, "W(g,g)")
    value = amalgam_norm(compose_j(gs.values), spec.lattice, spec)
    return ClassNormReport(value, spec.q, spec, value < threshold)


def modspace_norm(sigma, q: float, weight: WeightSpec, phi=None) -> float:
    """``M^{inf,q}_{1 (x) v}`` norm on the grid: ``l^q_v`` norm of the grand symbol.

    ``phi`` defaults to ``W(phi0, phi0)`` with ``phi0`` the periodized Gaussian.
    """
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0]
    phi = default_symbol_window(n) if phi is None else phi
    gv = grand_symbol(sigma, phi).values * weight.on_plane(n)
    if float(q) == 1:
        return float(gv.sum())
    if math.isinf(float(q)):
        return float(gv.max())
    raise ValueError("q must be 1 or inf")


def window_independence_check(sigma, g1, g2, spec: AlgebraSpec) -> float:
    """Ratio of the Sjostrand norms measured with ``W(g1,g1)`` and ``W(g2,g2)``."""
    n1 = sjostrand_norm(sigma, g1, spec).sjostrand_norm
    n2 = sjostrand_norm(sigma, g2, spec).sjostrand_norm
    if n2 == 0:
        return 1.0 if n1 == 0 else math.inf
    return n1 / n2


@dataclass(frozen=True)
class HormanderRow:
    s: float
    fit: DecayFit
    constant: float


@dataclass(frozen=True, eq=False)
class HormanderProfile:
    envelope: LatticeSeq
    rows: list

    def max_beyond(self, dist: float) -> float:
        """Largest envelope value at periodic distance strictly above ``dist``."""
        r = self.envelope.lattice.radii
        vals = np.abs(self.envelope.values)
        far = r > dist
        return float(vals[far].max()) if far.any() else 0.0


def hormander_profile(sigma, g, s_list=(0, 2, 4, 6, 8), min_dist: float = 2.0) -> HormanderProfile:
    """Decay profile of ``|<sigma^w pi(z) g, pi(w) g>|`` in ``w - z``.

    For each ``s`` the smallest ``C_s`` with ``|...| <= C_s <w-z>^{-s}`` over
    all grid pairs is reported together with a power-law fit of the envelope.
    """
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0]
    full = PhaseLattice(n, 1, 1)
    elems = np.abs(full_matrix_elements(sigma, g))
    env = np.zeros(full.size)
    np.maximum.at(env, full.diff_index.ravel(), elems.ravel())
    env_seq = LatticeSeq(env.reshape(full.shape), full)
    try:
        fit = decay_fit(env_seq, min_dist)
    except ValueError:
        fit = DecayFit(math.inf, 0.0, 0.0, 0)
    bracket = np.sqrt(1 + full.radii**2)
    rows = [HormanderRow(float(s), fit, float(np.max(env.reshape(full.shape) * bracket**s)))
            for s in s_list]
    return HormanderProfile(env_seq, rows)
