"""Gabor matrices of Weyl operators and their almost-diagonalization.

For a tight Gabor system with atoms ``A = [pi(lambda) g]`` the Gabor matrix of
a symbol is ``M(sigma) = A^H sigma^w A``, i.e.
``M(sigma)[lambda, mu] = <sigma^w pi(mu) g, pi(lambda) g>``.  Because
``A A^H = I`` the map ``sigma -> M(sigma)`` is multiplicative and intertwines
``sigma^w`` with ``M(sigma)`` on coefficient sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import complex_normal, make_rng
from .cdmat import CDMatrix, DecayFit, apply, cda_norm, decay_fit, pinv
from .phase import GaborSystem, analysis, stft, wigner
from .seqalg import (
    AlgebraSpec,
    LatticeSeq,
    PhaseLattice,
    WeightSpec,
    check_algebra_weight,
    convolve,
    involute,
    sequence_norm,
)
from .symclass import compose_j, grand_symbol, local_suprema, sjostrand_norm
from .weyl import dequantize, full_matrix_elements, quantize, twisted_product

__all__ = [
    "GaborMatrix",
    "DominatingFunction",
    "ChainReport",
    "NormEquivalenceReport",
    "AlgebraIdentityReport",
    "NormChainReport",
    "BoundednessReport",
    "InversionReport",
    "SpectralReport",
    "KernelRangeReport",
    "gabor_matrix",
    "envelope_h",
    "dominating_H",
    "aldia_chain_check",
    "constructive_lower_constant",
    "norm_equivalence_check",
    "algebra_identity_check",
    "algebra_norm_chain",
    "boundedness_check",
    "invert_symbol",
    "spectral_invariance_experiment",
    "kernel_range_check",
]


class GaborMatrix(CDMatrix):
    """A :class:`CDMatrix` that remembers the system and symbol it came from."""

    def __init__(self, entries, system: GaborSystem, symbol_id: str = "custom",
                 diagram_residual: float = 0.0):
        super().__init__(entries, system.lattice)
        self.system = system
        self.symbol_id = symbol_id
        self.diagram_residual = diagram_residual

    def header(self) -> dict:
        lat = self.lattice
        return {"symbolId": self.symbol_id, "systemId": self.system.to_dict(),
                "n": lat.n, "alpha": lat.alpha, "beta": lat.beta}


def _require_tight(sys: GaborSystem):
    if not sys.tight:
        raise ValueError("the Gabor system must be tight (frame operator = identity)")


def gabor_matrix(sigma, sys: GaborSystem, symbol_id: str = "custom", n_check: int = 5,
                 seed: int = 0) -> GaborMatrix:
    """``M(sigma)`` for a tight system.

    The intertwining ``analysis(sigma^w f) = M(sigma) analysis(f)`` is checked
    on ``n_check`` seeded signals; the worst relative residual is stored on the
    result as ``diagram_residual``.
    """
    _require_tight(sys)
    op = quantize(sigma)
    a = sys.atoms
    entries = a.conj().T @ op @ a
    resid = 0.0
    if n_check:
        f = complex_normal(make_rng(seed), (sys.n, n_check))
        lhs = a.conj().T @ (op @ f)
        rhs = entries @ (a.conj().T @ f)
        resid = float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))
    return GaborMatrix(entries, sys, symbol_id, resid)


def envelope_h(m: CDMatrix) -> LatticeSeq:
    """Smallest ``h`` with ``|M[lambda, mu]| <= h(lambda - mu)``."""
    return m.envelope


def _box_difference(lattice: PhaseLattice) -> np.ndarray:
    """Points of ``C - C`` for the box fundamental domain ``C``."""
    a, b = lattice.alpha, lattice.beta
    da, db = np.meshgrid(np.arange(-a + 1, a), np.arange(-b + 1, b), indexing="ij")
    return np.stack([da.ravel(), db.ravel()], axis=1)


@dataclass(frozen=True, eq=False)
class DominatingFunction:
    """``H`` on ``Z_N^2`` together with the sequences used to build it."""

    H: np.ndarray
    h: LatticeSeq
    alpha: LatticeSeq
    beta: LatticeSeq
    hconv: LatticeSeq
    kernel: LatticeSeq  # alpha * alpha^* * beta

    def constant(self, spec: AlgebraSpec) -> float:
        """``C = ||alpha * alpha^* * beta||_A``."""
        return float(sequence_norm(self.kernel, spec.weight, spec.q))


def dominating_H(h: LatticeSeq, sys: GaborSystem) -> DominatingFunction:
    """Build ``H(zeta) = sum_nu (h * alpha * alpha^*)(nu) chi_{C-C}(zeta - nu)``.

    ``alpha(nu) = max_{zeta in C} |V_g g(nu + zeta)|`` and
    ``beta(nu) = max_{zeta in C} chi_{C-C}(zeta + nu)``.
    """
    lat = sys.lattice
    if h.lattice != lat:
        raise ValueError("h lives on a different lattice")
    n = lat.n
    alpha = local_suprema(np.abs(stft(sys.window, sys.window)), lat)
    hconv = convolve(convolve(abs(h), alpha), involute(alpha))
    diffs = _box_difference(lat)

    # beta: does nu + C meet C - C (mod N)?
    box = lat.fundamental_domain
    reach = np.zeros((n, n), dtype=bool)
    reach[diffs[:, 0] % n, diffs[:, 1] % n] = True
    pts = lat.points
    hit = reach[(pts[:, None, 0] + box[None, :, 0]) % n, (pts[:, None, 1] + box[None, :, 1]) % n]
    beta = LatticeSeq(hit.any(axis=1).astype(float), lat)

    grid = np.zeros((n, n))
    grid[pts[:, 0], pts[:, 1]] = hconv.real.ravel()
    H = np.zeros((n, n))
    for d in diffs:
        H += np.roll(grid, tuple(d), axis=(0, 1))
    kernel = convolve(convolve(alpha, involute(alpha)), beta)
    return DominatingFunction(H, abs(h), alpha, beta, LatticeSeq(hconv.real, lat),
                              LatticeSeq(kernel.real, lat))


@dataclass(frozen=True)
class ChainReport:
    """Violations (positive = broken) of the three domination steps, and the norm bound."""

    grand_symbol_excess: float
    envelope_excess: float
    dominating_excess: float
    amalgam_norm_H: float
    norm_bound: float
    constant: float
    algebra_constant: float

    @property
    def norm_ok(self) -> bool:
        return self.amalgam_norm_H <= self.norm_bound * (1 + 1e-10)


def aldia_chain_check(sigma, sys: GaborSystem, spec: AlgebraSpec) -> ChainReport:
    """Check the finite almost-diagonalization chain for one symbol.

    (a) ``|<sigma^w pi(z) g, pi(w) g>| <= G(sigma)(j(w - z))`` on all grid pairs;
    (b) ``h(nu) <= max_{zeta in nu + C} G(sigma)(j(zeta))``;
    (c) ``H(w - z)`` built from ``h`` dominates every grid matrix element.
    Excesses are ``max(lhs - rhs) / max(rhs)`` and should be ``<= 0`` up to
    rounding.  The norm
    bound is ``||H||_{W(A)} <= K C ||h||_A`` with ``K`` the algebra constant
    of ``spec`` on the finite lattice.
    """
    _require_tight(sys)
    n = sys.n
    g = sys.window
    elems = np.abs(full_matrix_elements(sigma, g))
    diff = PhaseLattice(n, 1, 1).diff_index  # flat index of w - z
    gj = compose_j(grand_symbol(sigma, wigner(g, g)).values).ravel()
    exc_a = _rel_excess(elems, gj[diff])

    m = gabor_matrix(sigma, sys, n_check=0)
    h = envelope_h(m)
    loc = local_suprema(gj.reshape(n, n), sys.lattice)
    exc_b = _rel_excess(h.real, loc.real)

    dom = dominating_H(h, sys)
    exc_c = _rel_excess(elems, dom.H.ravel()[diff])

    lhs = float(sequence_norm(local_suprema(dom.H, sys.lattice), spec.weight, spec.q))
    c = dom.constant(spec)
    k = _algebra_constant(spec)
    rhs = k * c * float(sequence_norm(h, spec.weight, spec.q))
    return ChainReport(exc_a, exc_b, exc_c, lhs, rhs, c, k)


def _rel_excess(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = float(np.max(rhs))
    exc = float(np.max(lhs - rhs))
    return exc / scale if scale > 0 else exc


def _algebra_constant(spec: AlgebraSpec) -> float:
    loose = AlgebraSpec(spec.weight, spec.q, spec.lattice, strict=False)
    return max(1.0, check_algebra_weight(loose).worst_ratio)


def constructive_lower_constant(sys: GaborSystem, spec: AlgebraSpec) -> float:
    """``c = 1 / (N K C)`` with ``c ||sigma|| <= ||M(sigma)||`` for every symbol.

    Follows from ``G(sigma)(j(d)) = N max_{w - z = d} |E(w, z)| <= N H(d)``.
    """
    dom = dominating_H(LatticeSeq.delta(sys.lattice), sys)
    return 1.0 / (sys.n * _algebra_constant(spec) * dom.constant(spec))


@dataclass(frozen=True)
class NormEquivalenceReport:
    matrix_norm: float
    symbol_norm: float
    c_lower: float
    upper_ok: bool
    constructive_c: float

    @property
    def lower_ok(self) -> bool:
        return self.symbol_norm == 0 or self.c_lower >= self.constructive_c * (1 - 1e-10)


def norm_equivalence_check(sigma, sys: GaborSystem, spec: AlgebraSpec) -> NormEquivalenceReport:
    """Compare ``||M(sigma)||_{C_A}`` with the Sjostrand norm of ``sigma``.

    ``c_lower`` is the observed ratio (``nan`` for the zero symbol).
    """
    _require_tight(sys)
    mn = cda_norm(gabor_matrix(sigma, sys, n_check=0), spec)
    sn = sjostrand_norm(sigma, sys.window, spec).sjostrand_norm
    ratio = mn / sn if sn > 0 else math.nan
    return NormEquivalenceReport(mn, sn, ratio, mn <= sn * (1 + 1e-10) + 1e-300,
                                 constructive_lower_constant(sys, spec))


def _range_vectors(sys: GaborSystem, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded coefficient vectors split into range and complement parts."""
    c = complex_normal(make_rng(seed), (sys.lattice.size, count))
    on = sys.range_projector @ c
    return on, c - on


@dataclass(frozen=True)
class AlgebraIdentityReport:
    max_err_on_range: float
    max_err_complement: float


def algebra_identity_check(sigma, tau, sys: GaborSystem, count: int = 10,
                           seed: int = 0) -> AlgebraIdentityReport:
    """``M(sigma # tau) c = M(sigma) M(tau) c`` on the analysis range.

    Errors are ``max ||.||_2 / ||c||_2`` over the seeded vectors; on the
    complement both products should vanish.
    """
    _require_tight(sys)
    left = gabor_matrix(twisted_product(sigma, tau), sys, n_check=0).entries
    right = gabor_matrix(sigma, sys, n_check=0).entries @ gabor_matrix(tau, sys, n_check=0).entries
    on, off = _range_vectors(sys, count, seed)
    cn = np.linalg.norm(on, axis=0)
    err = np.linalg.norm(left @ on - right @ on, axis=0) / cn
    offn = np.linalg.norm(off, axis=0)
    comp = np.maximum(np.linalg.norm(left @ off, axis=0), np.linalg.norm(right @ off, axis=0)) / offn
    return AlgebraIdentityReport(float(err.max()), float(comp.max()))


@dataclass(frozen=True)
class NormChainReport:
    product_norm: float
    bound: float
    constant: float
    ok: bool


def algebra_norm_chain(sigma, tau, sys: GaborSystem, spec: AlgebraSpec) -> NormChainReport:
    """``||sigma # tau|| <= (K / c) ||sigma|| ||tau||`` with measured ``K`` and constructive ``c``."""
    c = constructive_lower_constant(sys, spec)
    k = _algebra_constant(spec)
    prod = sjostrand_norm(twisted_product(sigma, tau), sys.window, spec).sjostrand_norm
    ns = sjostrand_norm(sigma, sys.window, spec).sjostrand_norm
    nt = sjostrand_norm(tau, sys.window, spec).sjostrand_norm
    const = k / c
    bound = const * ns * nt
    return NormChainReport(prod, bound, const, prod <= bound * (1 + 1e-10) + 1e-300)


@dataclass(frozen=True)
class BoundednessReport:
    ok: bool
    worst_ratio: float
    constant: float
    matrix_norm: float


def boundedness_check(sigma, sys: GaborSystem, spec: AlgebraSpec, y_weight: WeightSpec,
                      p: float, count: int = 10, seed: int = 0,
                      slack: float = 1e-10) -> BoundednessReport:
    """``||analysis(sigma^w f)||_Y <= K ||M(sigma)||_{C_A} ||analysis(f)||_Y`` on seeded ``f``.

    ``Y = l^p_{y_weight}``; ``K`` is the exact action constant of ``spec`` on
    ``Y`` (1 for flat ``l^1``).  ``worst_ratio`` is ``max lhs / rhs``.
    """
    _require_tight(sys)
    m = gabor_matrix(sigma, sys, n_check=0)
    op = quantize(sigma)
    rng = make_rng(seed)
    worst, ok, k = 0.0, True, 1.0
    for _ in range(count):
        f = complex_normal(rng, sys.n)
        c = analysis(sys, f)
        out, rep = apply(m, c, spec, y_weight, p, slack)
        direct = sequence_norm(analysis(sys, op @ f), y_weight, p)
        # the sequence-level product must agree with the operator route
        if not math.isclose(direct, rep.lhs, rel_tol=1e-9, abs_tol=1e-12):
            ok = False
        k = rep.constant
        worst = max(worst, rep.lhs / rep.rhs if rep.rhs > 0 else (0.0 if rep.lhs == 0 else math.inf))
        ok = ok and rep.ok
    return BoundednessReport(ok, worst, k, cda_norm(m, spec))


@dataclass(frozen=True)
class InversionReport:
    pinv_match_frob: float
    smallest_singular_ratio: float
    decay_sigma: DecayFit | None
    decay_tau: DecayFit | None


def _safe_fit(m: CDMatrix) -> DecayFit | None:
    try:
        return decay_fit(m.envelope)
    except ValueError:
        return None


def invert_symbol(sigma, sys: GaborSystem, rtol: float = 1e-8):
    """Symbol ``tau`` of ``(sigma^w)^{-1}`` and a report comparing ``M(tau)`` with ``pinv(M(sigma))``.

    Raises ``ValueError("operator not invertible at rtol")`` when the smallest
    singular value of ``sigma^w`` is below ``rtol`` times the largest.
    """
    _require_tight(sys)
    op = quantize(sigma)
    s = np.linalg.svd(op, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    if ratio <= rtol:
        raise ValueError("operator not invertible at rtol")
    tau = dequantize(np.linalg.inv(op))
    m_sigma = gabor_matrix(sigma, sys, n_check=0)
    m_tau = gabor_matrix(tau, sys, n_check=0)
    pm = pinv(m_sigma, rtol=min(1e-10, rtol)).entries
    err = float(np.linalg.norm(m_tau.entries - pm) / np.linalg.norm(pm))
    return tau, InversionReport(err, ratio, _safe_fit(m_sigma), _safe_fit(m_tau))


@dataclass(frozen=True)
class SpectralReport:
    residual: float
    inverse_matrix_norm: float
    pinv_match_frob: float


def spectral_invariance_experiment(sigma, sys: GaborSystem, spec: AlgebraSpec, p: float,
                                   y_weight: WeightSpec, count: int = 10, seed: int = 0,
                                   rtol: float = 1e-8) -> SpectralReport:
    """``tau^w sigma^w f = f`` measured in ``l^p_y`` after analysis, ``tau`` the inverse symbol.

    ``residual`` is the worst relative error over ``count`` seeded signals.
    """
    tau, rep = invert_symbol(sigma, sys, rtol)
    prod = quantize(tau) @ quantize(sigma)
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(count):
        f = complex_normal(rng, sys.n)
        ref = analysis(sys, f)
        got = analysis(sys, prod @ f)
        num = sequence_norm(got - ref, y_weight, p)
        worst = max(worst, num / sequence_norm(ref, y_weight, p))
    m_tau = gabor_matrix(tau, sys, n_check=0)
    return SpectralReport(worst, cda_norm(m_tau, spec), rep.pinv_match_frob)


@dataclass(frozen=True)
class KernelRangeReport:
    kernel_err: float  # ||M P_perp||_2
    range_err: float  # ||P_perp M P||_2
    hermitian_err: float  # ||M - M^H||_2 / ||M||_2


def kernel_range_check(m: GaborMatrix) -> KernelRangeReport:
    """Operator-norm residuals of ``M P_perp = 0`` and ``P_perp M P = 0``."""
    p = m.system.range_projector
    perp = np.eye(p.shape[0]) - p
    e = m.entries
    ker = float(np.linalg.norm(e @ perp, 2))
    ran = float(np.linalg.norm(perp @ e @ p, 2))
    scale = float(np.linalg.norm(e, 2))
    herm = float(np.linalg.norm(e - e.conj().T, 2) / scale) if scale > 0 else 0.0
    return KernelRangeReport(ker, ran, herm)
