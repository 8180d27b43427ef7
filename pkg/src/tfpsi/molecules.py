"""Time-frequency molecules on ``Z_N`` and periodized local sine bases.

The first half works in the finite model: a molecule family is a set of
signals ``e_mu`` indexed by the Gabor lattice whose Gabor coefficients are
dominated by a fixed sequence centred at ``mu``.

The second half is a small continuous-domain experiment on the circle
``[0, P)`` with ``P = alpha * K``: smooth bells, the local sine basis built
from them and the Weyl operator of a smooth symbol, all sampled on a uniform
grid and integrated with the trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import complex_normal, make_rng
from .aldiag import envelope_h, gabor_matrix
from .cdmat import DecayFit, decay_fit
from .phase import GaborSystem, periodic_length, periodized_gaussian, stft, tf_shift
from .seqalg import AlgebraSpec, LatticeSeq, convolve, involute
from .weyl import quantize

__all__ = [
    "MoleculeFamily",
    "MoleculeDiagReport",
    "frame_molecules",
    "make_molecules",
    "molecules_from_operator",
    "molecule_almost_diag",
    "envelope_decay",
    "BellSpec",
    "SampledFunction",
    "SineBasis",
    "KompostReport",
    "SineDiagTable",
    "bell_profile",
    "bell",
    "bell_partition_error",
    "local_sine_basis",
    "kompost_decompose",
    "weyl_on_circle",
    "sine_basis_almost_diag",
]


# --- molecules in the finite model ------------------------------------------


@dataclass(frozen=True, eq=False)
class MoleculeFamily:
    """Signals ``e_mu`` (columns of ``members``) with ``|<e_mu, pi(lambda) g>| <= a(lambda - mu)``."""

    members: np.ndarray
    envelope_bound: LatticeSeq
    system: GaborSystem
    centers: np.ndarray = field(repr=False)
    decay_constant: float = math.nan

    def coefficients(self, system: GaborSystem | None = None) -> np.ndarray:
        """``C[lambda, mu] = <e_mu, pi(lambda) g>`` against ``system`` (default: the reference)."""
        sys = self.system if system is None else system
        return sys.atoms.conj().T @ self.members

    def measured_envelope(self, system: GaborSystem | None = None) -> LatticeSeq:
        """Exhaustive scan ``max_mu |<e_mu, pi(mu + nu) g>|``."""
        sys = self.system if system is None else system
        lat = sys.lattice
        out = np.zeros(lat.size)
        np.maximum.at(out, lat.diff_index.ravel(), np.abs(self.coefficients(sys)).ravel())
        return LatticeSeq(out.reshape(lat.shape), lat)

    def bound_excess(self) -> float:
        """``max (|<e_mu, pi(lambda) g>| - a(lambda - mu))``; ``<= 0`` when the bound holds."""
        lat = self.system.lattice
        a = self.envelope_bound.real.ravel()[lat.diff_index]
        return float(np.max(np.abs(self.coefficients()) - a))

    def centred_constant(self, s: float) -> float:
        """Smallest ``C''`` with ``|<e_mu, pi(lambda) g>| <= C'' <lambda - mu>^-s``."""
        lat = self.system.lattice
        bracket = np.sqrt(1 + lat.radii.ravel() ** 2)[lat.diff_index]
        return float(np.max(np.abs(self.coefficients()) * bracket**s))


def _tight_only(sys: GaborSystem):
    if not sys.tight:
        raise ValueError("molecule families need a tight reference system")


def _family(members: np.ndarray, sys: GaborSystem, centers, constant=math.nan) -> MoleculeFamily:
    members = np.array(members)
    members.setflags(write=False)
    fam = MoleculeFamily(members, LatticeSeq.zeros(sys.lattice), sys, np.asarray(centers), constant)
    object.__setattr__(fam, "envelope_bound", fam.measured_envelope())
    return fam


def frame_molecules(sys: GaborSystem) -> MoleculeFamily:
    """The Gabor frame ``{pi(mu) g}`` viewed as a molecule family."""
    _tight_only(sys)
    return _family(sys.atoms, sys, sys.lattice.points)


def _jitter_offsets(bound: float) -> np.ndarray:
    r = int(math.floor(bound))
    x = np.arange(-r, r + 1)
    d = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)
    return d[np.hypot(d[:, 0], d[:, 1]) <= bound]


def make_molecules(sys: GaborSystem, jitter_bound: float, s: float, seed: int) -> MoleculeFamily:
    """Seeded molecule family ``e_mu = pi(z_mu) phi_mu``.

    ``z_mu`` is ``mu`` moved by an integer offset of length at most
    ``jitter_bound``.  Each ``phi_mu`` is a random combination of three
    shifted periodized Gaussians, rescaled so that
    ``max_z |V_g phi_mu(z)| <z>^s = 1``; the common constant is therefore 1.
    The envelope bound is the exhaustive scan of the finished family.
    """
    _tight_only(sys)
    if s <= 2:
        raise ValueError("molecules need decay order s > 2")
    if jitter_bound < 0:
        raise ValueError("jitter_bound must be non-negative")
    n = sys.n
    lat = sys.lattice
    rng = make_rng(seed)
    offsets = _jitter_offsets(jitter_bound)
    base = periodized_gaussian(n)
    x = np.arange(n)
    grid = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    bracket_s = (1 + periodic_length(grid, n) ** 2) ** (s / 2)
    g = sys.window
    members, centers = [], []
    for mu in lat.points:
        z = mu + offsets[rng.integers(len(offsets))]
        shifts = rng.integers(-1, 2, size=3)
        coef = complex_normal(rng, 3)
        phi = sum(c * np.roll(base, int(t)) for c, t in zip(coef, shifts))
        v = np.abs(stft(phi, g))
        phi = phi / np.max(v * bracket_s)
        members.append(tf_shift(z % n, phi))
        centers.append(z % n)
    return _family(np.stack(members, axis=1), sys, np.array(centers), 1.0)


def molecules_from_operator(sigma, sys: GaborSystem) -> MoleculeFamily:
    """The images ``sigma^w pi(mu) g`` as a family; its envelope bound is the Gabor-matrix envelope."""
    _tight_only(sys)
    return _family(quantize(sigma) @ sys.atoms, sys, sys.lattice.points)


@dataclass(frozen=True, eq=False)
class MoleculeDiagReport:
    h_tilde: LatticeSeq
    max_excess: float
    ok: bool


def molecule_almost_diag(sigma, fam_e: MoleculeFamily, fam_f: MoleculeFamily,
                         spec: AlgebraSpec | None = None, slack: float = 1e-10) -> MoleculeDiagReport:
    """Check ``|<sigma^w f_mu, e_lambda>| <= (a' * a^* * h)(lambda - mu)`` on all pairs.

    ``a`` is the bound of ``fam_e``, ``a'`` that of ``fam_f`` and ``h`` the
    envelope of the Gabor matrix of ``sigma``.  ``max_excess`` is relative to
    ``max h_tilde``; ``spec`` is accepted for symmetry with the other checks
    and only used to validate the lattice.
    """
    sys = fam_e.system
    if fam_f.system is not sys and not (
        fam_f.system.lattice == sys.lattice and np.array_equal(fam_f.system.window, sys.window)
    ):
        raise ValueError("molecule families refer to different Gabor systems")
    if spec is not None and spec.lattice != sys.lattice:
        raise ValueError("spec lattice differs from the system lattice")
    h = envelope_h(gabor_matrix(sigma, sys, n_check=0))
    h_tilde = convolve(convolve(fam_f.envelope_bound, involute(fam_e.envelope_bound)), h)
    h_tilde = LatticeSeq(h_tilde.real, sys.lattice)
    lat = sys.lattice
    elems = np.abs(fam_e.members.conj().T @ quantize(sigma) @ fam_f.members)  # [lambda, mu]
    bound = h_tilde.real.ravel()[lat.diff_index]
    scale = float(np.max(bound))
    excess = float(np.max(elems - bound))
    rel = excess / scale if scale > 0 else excess
    return MoleculeDiagReport(h_tilde, rel, rel <= slack)


def envelope_decay(fam: MoleculeFamily, system: GaborSystem | None = None) -> DecayFit:
    """Power-law fit of the measured envelope of ``fam`` against ``system``."""
    return decay_fit(fam.measured_envelope(system))


# --- bells and local sine bases on the circle --------------------------------


@dataclass(frozen=True)
class BellSpec:
    """Bell of length ``alpha`` with transitions of half-width ``epsilon``.

    The transition bump is ``zeta(t) = c (1 - (t/eps)^2)^smoothness`` on
    ``|t| < eps`` with ``c`` chosen so that ``int zeta = pi/2``.
    """

    alpha: float
    epsilon: float
    smoothness: int = 3
    grid_step: float = 1.0 / 512

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (0 < self.epsilon < self.alpha / 2):
            raise ValueError("epsilon must satisfy 0 < epsilon < alpha/2")
        if int(self.smoothness) != self.smoothness or self.smoothness < 1:
            raise ValueError("smoothness must be an integer >= 1")
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")

    @classmethod
    def on_circle(cls, alpha: float, epsilon: float, smoothness: int, bells: int,
                  points: int = 2048) -> "BellSpec":
        """Spec whose grid step is ``alpha * bells / points``."""
        return cls(alpha, epsilon, smoothness, alpha * bells / points)

    def grid_points(self, bells: int) -> int:
        """Samples per period ``alpha * bells``; raises if the grid does not fit."""
        per_bell = self.alpha / self.grid_step
        if abs(per_bell - round(per_bell)) > 1e-9 * per_bell:
            raise ValueError("alpha must be an integer number of grid steps")
        return int(round(per_bell)) * bells

    def _poly(self):
        m = int(self.smoothness)
        k = np.arange(m + 1)
        coeff = np.array([math.comb(m, j) for j in k], float) * (-1.0) ** k
        return coeff, 2 * k + 1

    @property
    def normalization(self) -> float:
        """``c`` with ``int_{-eps}^{eps} c (1 - (t/eps)^2)^N dt = pi/2``."""
        coeff, odd = self._poly()
        integral = self.epsilon * float(np.sum(coeff * 2.0 / odd))
        return math.pi / 2 / integral

    def zeta(self, t) -> np.ndarray:
        u = np.asarray(t, float) / self.epsilon
        return self.normalization * np.clip(1 - u * u, 0, None) ** int(self.smoothness)

    def theta(self, t) -> np.ndarray:
        """``int_{-inf}^t zeta``, from the exact antiderivative of the polynomial bump."""
        coeff, odd = self._poly()
        u = np.clip(np.asarray(t, float) / self.epsilon, -1, 1)
        prim = np.sum(coeff[:, None] * u.ravel()[None, :] ** odd[:, None] / odd[:, None], axis=0)
        base = float(np.sum(coeff / odd))  # primitive at u = 1; at u = -1 it is -base
        return (self.normalization * self.epsilon * (prim + base)).reshape(u.shape)


def bell_profile(spec: BellSpec, t) -> np.ndarray:
    """``b(t) = sin(theta(t)) cos(theta(t - alpha))`` on the real line."""
    t = np.asarray(t, float)
    return np.sin(spec.theta(t)) * np.cos(spec.theta(t - spec.alpha))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples on ``[0, period)`` with uniform ``step``."""

    samples: np.ndarray
    step: float

    @property
    def period(self) -> float:
        return self.samples.size * self.step

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.step

    def inner(self, other: "SampledFunction") -> complex:
        """Trapezoid rule (exact rectangle rule on the circle) for ``int u conj(v)``."""
        return complex(self.step * np.vdot(other.samples, self.samples))


def _folded(spec: BellSpec, bells: int, shift: float):
    """Grid ``t`` and the two unfolded arguments ``t' = (t - shift) mod P`` and ``t' - P``."""
    m = spec.grid_points(bells)
    period = spec.alpha * bells
    t = np.arange(m) * spec.grid_step
    tp = np.mod(t - shift, period)
    return t, (tp, tp - period)


def bell(spec: BellSpec, bells: int = 2) -> SampledFunction:
    """The bell periodized over ``P = alpha * bells``."""
    if bells < 2:
        raise ValueError("need at least two bells on the circle")
    _, args = _folded(spec, bells, 0.0)
    return SampledFunction(sum(bell_profile(spec, a) for a in args), spec.grid_step)


def bell_partition_error(spec: BellSpec, bells: int) -> float:
    """``max |sum_k b(t - alpha k)^2 - 1|`` over the grid."""
    b = bell(spec, bells).samples
    shift = spec.grid_points(bells) // bells
    total = sum(np.roll(b, k * shift) ** 2 for k in range(bells))
    return float(np.max(np.abs(total - 1)))


@dataclass(frozen=True, eq=False)
class SineBasis:
    """Rows of ``samples`` are ``psi_{k,l}``, ordered k-major like ``indices``."""

    samples: np.ndarray
    indices: np.ndarray
    spec: BellSpec
    bells: int

    @property
    def step(self) -> float:
        return self.spec.grid_step

    def function(self, k: int, l: int) -> SampledFunction:
        lmax = self.indices[:, 1].max()
        return SampledFunction(self.samples[k * (lmax + 1) + l], self.step)

    def gram(self) -> np.ndarray:
        return self.step * self.samples.conj() @ self.samples.T


def _sine_atom(spec: BellSpec, bells: int, k: int, l: int) -> np.ndarray:
    a = spec.alpha
    _, args = _folded(spec, bells, a * k)
    return math.sqrt(2 / a) * sum(
        bell_profile(spec, u) * np.sin((2 * l + 1) * np.pi * u / (2 * a)) for u in args
    )


def local_sine_basis(spec: BellSpec, bells: int, l_max: int) -> SineBasis:
    """``psi_{k,l}(t) = sqrt(2/alpha) b(t - alpha k) sin((2l+1) pi (t - alpha k) / (2 alpha))``.

    ``k = 0..bells-1`` and ``l = 0..l_max``, each periodized over ``P = alpha * bells``.
    """
    if bells % 2:
        raise ValueError("period mismatch: the number of bells must be even")
    if bells < 2 or l_max < 1:
        raise ValueError("need bells >= 2 and l_max >= 1")
    idx = np.array([(k, l) for k in range(bells) for l in range(l_max + 1)])
    rows = np.stack([_sine_atom(spec, bells, k, l) for k, l in idx])
    return SineBasis(rows, idx, spec, bells)


@dataclass(frozen=True)
class KompostReport:
    max_point_err: float


def kompost_decompose(spec: BellSpec, k: int, l: int, bells: int = 4) -> KompostReport:
    """Compare ``psi_{k,l}`` with its splitting into two time-frequency shifted exponential bells.

    ``psi = ((-1)^{kl} / 2i) sqrt(2/alpha) (pi(alpha k, l/(2 alpha)) b_+ - pi(alpha k, -l/(2 alpha)) b_-)``
    with ``b_pm(t) = exp(pm i pi t / (2 alpha)) b(t)``; shifts act on the grid of the circle.
    """
    if bells % 2:
        raise ValueError("period mismatch: the number of bells must be even")
    a = spec.alpha
    t, args = _folded(spec, bells, 0.0)
    b_plus = sum(np.exp(1j * np.pi * u / (2 * a)) * bell_profile(spec, u) for u in args)
    b_minus = sum(np.exp(-1j * np.pi * u / (2 * a)) * bell_profile(spec, u) for u in args)
    shift = k * (spec.grid_points(bells) // bells)
    freq = l / (2 * a)

    def tf(f, w):
        return np.exp(2j * np.pi * w * t) * np.roll(f, shift)

    rhs = ((-1) ** (k * l) / 2j) * math.sqrt(2 / a) * (tf(b_plus, freq) - tf(b_minus, -freq))
    lhs = _sine_atom(spec, bells, k, l)
    return KompostReport(float(np.max(np.abs(lhs - rhs))))


def _centered(m: int) -> np.ndarray:
    return np.arange(m) - m // 2


def weyl_on_circle(sigma, spec: BellSpec, bells: int, chunk: int = 256) -> np.ndarray:
    """Kernel matrix of the Weyl operator of ``sigma(t, omega)`` on the sampled circle.

    ``K[n, n - d] = (step / P) sum_m sigma(t_n - d step / 2, m / P) exp(2 pi i d m / M)``
    with ``d`` and ``m`` running over centred representatives mod ``M``.
    ``sigma`` must accept broadcast arrays ``(t, omega)``.
    """
    m_pts = spec.grid_points(bells)
    period = spec.alpha * bells
    step = spec.grid_step
    omega = _centered(m_pts) / period
    d = _centered(m_pts)
    kern = np.zeros((m_pts, m_pts), dtype=complex)
    half = np.arange(2 * m_pts)  # half-step grid tau_j = j * step / 2
    for start in range(0, 2 * m_pts, chunk):
        j = half[start:start + chunk]
        vals = np.asarray(sigma(j[:, None] * step / 2, omega[None, :]), dtype=complex)
        vals = np.broadcast_to(vals, (j.size, m_pts))
        # sum_m vals[:, m] exp(2 pi i d m_c / M), m_c = m - M/2, via an inverse FFT
        s = np.fft.ifft(np.fft.ifftshift(vals, axes=1), axis=1) * m_pts  # index d mod M
        s = s[:, d % m_pts]
        # midpoint t_n - d step/2 sits at half index j = 2n - d
        jj = j[:, None]
        par = (jj + d[None, :]) % 2 == 0
        rows, cols = np.nonzero(par)
        n_idx = ((jj + d[None, :])[rows, cols] // 2) % m_pts
        kern[n_idx, (n_idx - d[cols]) % m_pts] = s[rows, cols]
    return kern * (step / period)


@dataclass(frozen=True, eq=False)
class SineDiagTable:
    matrix: np.ndarray  # [(k, l), (k', l')] = <sigma^w psi_{k',l'}, psi_{k,l}>
    indices: np.ndarray
    constants: dict

    def rows(self):
        return sorted(self.constants.items())


def sine_basis_almost_diag(sigma, spec: BellSpec, bells: int, l_max: int,
                           s_list=(2, 3, 4)) -> SineDiagTable:
    """Matrix of a Weyl operator in the local sine basis and the constants ``C_s``.

    ``C_s`` is the smallest constant with
    ``|<sigma^w psi_{k',l'}, psi_{k,l}>| <= C_s (<(alpha dk, (l - l')/(2 alpha))>^-s
    + <(alpha dk, (l + l')/(2 alpha))>^-s)`` where ``dk`` is ``k - k'`` reduced
    to its smallest representative modulo the number of bells.
    """
    if spec.grid_step > spec.epsilon / 8:
        raise ValueError("quadrature grid too coarse: step must be at most epsilon/8")
    basis = local_sine_basis(spec, bells, l_max)
    kern = weyl_on_circle(sigma, spec, bells)
    psi = basis.samples
    mat = spec.grid_step * psi.conj() @ (kern @ psi.T)
    k, l = basis.indices[:, 0], basis.indices[:, 1]
    dk = np.mod(k[:, None] - k[None, :], bells)
    dk = np.minimum(dk, bells - dk) * spec.alpha
    a2 = 2 * spec.alpha
    minus = np.hypot(dk, (l[:, None] - l[None, :]) / a2)
    plus = np.hypot(dk, (l[:, None] + l[None, :]) / a2)
    mag = np.abs(mat)
    consts = {}
    for s in s_list:
        denom = (1 + minus**2) ** (-s / 2) + (1 + plus**2) ** (-s / 2)
        consts[float(s)] = float(np.max(mag / denom))
    return SineDiagTable(mat, basis.indices, consts)
