"""Phase-space lattices, weights and solid convolution algebras of sequences.

Everything here lives on the finite phase plane ``Z_N x Z_N`` with ``N`` odd.
A :class:`PhaseLattice` is the subgroup ``alpha Z_N x beta Z_N``; sequences on
it are stored as 2-D arrays indexed by the lattice coordinates ``(k, l)``,
which stand for the phase-space point ``(k*alpha, l*beta)``.  The group law is
addition of indices modulo ``(N/alpha, N/beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

__all__ = [
    "PhaseLattice",
    "WeightSpec",
    "AlgebraSpec",
    "LatticeSeq",
    "WeightReport",
    "L1MaxReport",
    "periodic_abs",
    "convolve",
    "involute",
    "algebra_norm",
    "sequence_norm",
    "check_algebra_weight",
    "convolution_action_constant",
    "grs_profile",
    "l1_maximality_check",
]


def periodic_abs(k, n: int) -> np.ndarray:
    """Minimal representative distance ``min(k mod n, n - k mod n)``."""
    k = np.mod(np.asarray(k), n)
    return np.minimum(k, n - k)


@dataclass(frozen=True)
class PhaseLattice:
    """The lattice ``{(k*alpha, l*beta)}`` inside ``Z_n x Z_n``.

    Points are enumerated k-major: ``(0,0), (0,beta), ..., (alpha, 0), ...``.
    """

    n: int
    alpha: int
    beta: int

    def __post_init__(self):
        n, a, b = self.n, self.alpha, self.beta
        if n < 1 or n % 2 == 0:
            raise ValueError(f"n must be an odd positive integer, got {n}")
        if a < 1 or b < 1 or n % a or n % b:
            raise ValueError(f"alpha={a} and beta={b} must be positive divisors of n={n}")
        if a * b >= n:
            raise ValueError(f"alpha*beta={a * b} must be smaller than n={n}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n // self.alpha, self.n // self.beta)

    @property
    def size(self) -> int:
        ka, kb = self.shape
        return ka * kb

    @cached_property
    def indices(self) -> np.ndarray:
        """Lattice coordinates ``(k, l)`` in enumeration order, shape (size, 2)."""
        ka, kb = self.shape
        k, l = np.meshgrid(np.arange(ka), np.arange(kb), indexing="ij")
        return np.stack([k.ravel(), l.ravel()], axis=1)

    @cached_property
    def points(self) -> np.ndarray:
        """Phase-space points ``(k*alpha, l*beta)`` in enumeration order."""
        return self.indices * np.array([self.alpha, self.beta])

    @cached_property
    def fundamental_domain(self) -> np.ndarray:
        """The box ``{0..alpha-1} x {0..beta-1}`` as an array of points."""
        a, b = np.meshgrid(np.arange(self.alpha), np.arange(self.beta), indexing="ij")
        return np.stack([a.ravel(), b.ravel()], axis=1)

    @cached_property
    def radii(self) -> np.ndarray:
        """Periodic Euclidean length ``|lambda|_N`` of each point, shape ``self.shape``."""
        p = self.points
        r = np.hypot(periodic_abs(p[:, 0], self.n), periodic_abs(p[:, 1], self.n))
        return r.reshape(self.shape)

    @cached_property
    def diff_index(self) -> np.ndarray:
        """Flat index of ``lambda_i - mu_j`` for every pair, shape (size, size)."""
        ka, kb = self.shape
        idx = self.indices
        dk = (idx[:, None, 0] - idx[None, :, 0]) % ka
        dl = (idx[:, None, 1] - idx[None, :, 1]) % kb
        return dk * kb + dl

    def flat_index(self, point) -> int:
        """Enumeration index of a phase-space point that lies on the lattice."""
        x, xi = (int(v) % self.n for v in point)
        if x % self.alpha or xi % self.beta:
            raise ValueError(f"point {point} is not on the lattice")
        return (x // self.alpha) * self.shape[1] + xi // self.beta

    def cell_labels(self) -> np.ndarray:
        """For each point of ``Z_n x Z_n`` the flat index of its lattice cell.

        Cell of ``zeta`` is the unique ``lambda`` with ``zeta - lambda`` in the
        fundamental domain.
        """
        x = np.arange(self.n)
        k = (x // self.alpha)[:, None]
        l = (x // self.beta)[None, :]
        return k * self.shape[1] + l


_WEIGHT_KINDS = ("flat", "polynomial", "subexponential")


@dataclass(frozen=True)
class WeightSpec:
    """A radial weight: flat, ``<r>^s`` or ``exp(delta * r^b)``."""

    kind: str = "flat"
    s: float = 0.0
    delta: float = 0.2
    b: float = 0.5

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "polynomial" and self.s < 0:
            raise ValueError("polynomial weight needs s >= 0")
        if self.kind == "subexponential" and not (self.delta > 0 and 0 < self.b < 1):
            raise ValueError("subexponential weight needs delta > 0 and 0 < b < 1")

    @classmethod
    def flat(cls) -> "WeightSpec":
        return cls("flat")

    @classmethod
    def polynomial(cls, s: float) -> "WeightSpec":
        return cls("polynomial", s=float(s))

    @classmethod
    def subexponential(cls, delta: float = 0.2, b: float = 0.5) -> "WeightSpec":
        return cls("subexponential", delta=float(delta), b=float(b))

    def of_radius(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == "flat":
            return np.ones_like(r)
        if self.kind == "polynomial":
            return (1.0 + r * r) ** (self.s / 2)
        return np.exp(self.delta * r**self.b)

    def on_lattice(self, lattice: PhaseLattice) -> np.ndarray:
        return self.of_radius(lattice.radii)

    def on_plane(self, n: int) -> np.ndarray:
        """Weight on the full grid ``Z_n x Z_n`` with the periodic metric."""
        d = periodic_abs(np.arange(n), n)
        return self.of_radius(np.hypot(d[:, None], d[None, :]))

    def unwrapped(self, points) -> np.ndarray:
        """Weight of integer points of ``Z^2`` with the ordinary Euclidean length."""
        p = np.asarray(points, dtype=float)
        return self.of_radius(np.hypot(p[..., 0], p[..., 1]))

    def to_dict(self) -> dict:
        if self.kind == "polynomial":
            return {"weightKind": "polynomial", "s": self.s}
        if self.kind == "subexponential":
            return {"weightKind": "subexponential", "delta": self.delta, "b": self.b}
        return {"weightKind": "flat"}


def _weight_admissible(weight: WeightSpec, q: float) -> bool:
    # q = inf needs 1/w summable on the infinite 2-D lattice
    if q == 1:
        return True
    if weight.kind == "flat":
        return False
    if weight.kind == "polynomial":
        return weight.s > 2
    return True


@dataclass(frozen=True)
class AlgebraSpec:
    """Weighted ``l^q`` algebra on a lattice, ``q`` in ``{1, inf}``.

    With ``strict=True`` (default) a weight that cannot make ``l^q_w`` an
    algebra on the infinite lattice is rejected.
    """

    weight: WeightSpec
    q: float
    lattice: PhaseLattice
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        q = float(self.q)
        if q not in (1.0, math.inf):
            raise ValueError(f"q must be 1 or inf, got {self.q}")
        object.__setattr__(self, "q", q)
        if self.strict and not _weight_admissible(self.weight, q):
            raise ValueError(
                f"weight {self.weight} does not give an algebra for q={q} "
                "(q=inf needs a summable reciprocal, e.g. polynomial s > 2)"
            )

    @cached_property
    def weights(self) -> np.ndarray:
        return self.weight.on_lattice(self.lattice)

    def to_dict(self) -> dict:
        d = {"n": self.lattice.n, "alpha": self.lattice.alpha, "beta": self.lattice.beta}
        d.update(self.weight.to_dict())
        d["q"] = "inf" if math.isinf(self.q) else 1
        return d

    @classmethod
    def from_dict(cls, d: dict, strict: bool = True) -> "AlgebraSpec":
        lat = PhaseLattice(int(d["n"]), int(d["alpha"]), int(d["beta"]))
        kind = d.get("weightKind", "flat")
        if kind == "polynomial":
            w = WeightSpec.polynomial(d["s"])
        elif kind == "subexponential":
            w = WeightSpec.subexponential(d.get("delta", 0.2), d.get("b", 0.5))
        else:
            w = WeightSpec(kind)
        q = d.get("q", 1)
        q = math.inf if str(q).lower() in ("inf", "infinity") else float(q)
        return cls(w, q, lat, strict=strict)


class LatticeSeq:
    """A complex sequence on a :class:`PhaseLattice`; immutable."""

    __slots__ = ("values", "lattice")

    def __init__(self, values, lattice: PhaseLattice):
        v = np.array(values, dtype=complex)
        if v.shape == (lattice.size,):
            v = v.reshape(lattice.shape)
        if v.shape != lattice.shape:
            raise ValueError(f"values of shape {v.shape} do not match lattice {lattice.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "lattice", lattice)

    def __setattr__(self, name, value):
        raise AttributeError("LatticeSeq is immutable")

    @classmethod
    def zeros(cls, lattice: PhaseLattice) -> "LatticeSeq":
        return cls(np.zeros(lattice.shape), lattice)

    @classmethod
    def delta(cls, lattice: PhaseLattice, index=(0, 0)) -> "LatticeSeq":
        """Unit sequence at lattice coordinates ``index`` (taken modulo the shape)."""
        v = np.zeros(lattice.shape)
        v[index[0] % lattice.shape[0], index[1] % lattice.shape[1]] = 1.0
        return cls(v, lattice)

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def _check(self, other: "LatticeSeq"):
        if other.lattice != self.lattice:
            raise ValueError("lattice mismatch")

    def __abs__(self):
        return LatticeSeq(np.abs(self.values), self.lattice)

    def __neg__(self):
        return LatticeSeq(-self.values, self.lattice)

    def __add__(self, other):
        if isinstance(other, LatticeSeq):
            self._check(other)
            other = other.values
        return LatticeSeq(self.values + other, self.lattice)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, LatticeSeq):
            self._check(other)
            other = other.values
        return LatticeSeq(self.values - other, self.lattice)

    def __mul__(self, other):
        if isinstance(other, LatticeSeq):
            self._check(other)
            other = other.values
        return LatticeSeq(self.values * other, self.lattice)

    __rmul__ = __mul__

    def allclose(self, other: "LatticeSeq", atol=1e-12, rtol=0.0) -> bool:
        self._check(other)
        return np.allclose(self.values, other.values, atol=atol, rtol=rtol)

    def __repr__(self):
        return f"LatticeSeq(shape={self.lattice.shape}, n={self.lattice.n})"


def _circulant(b: LatticeSeq) -> np.ndarray:
    """Matrix ``C[lambda, mu] = b(lambda - mu)`` in enumeration order."""
    return b.flat[b.lattice.diff_index]


def convolve(a: LatticeSeq, b: LatticeSeq) -> LatticeSeq:
    """Group convolution ``(a*b)(lambda) = sum_mu a(mu) b(lambda - mu)``."""
    if a.lattice != b.lattice:
        raise ValueError("lattice mismatch")
    return LatticeSeq(_circulant(b) @ a.flat, a.lattice)


def involute(a: LatticeSeq) -> LatticeSeq:
    """``a*(lambda) = conj(a(-lambda))``."""
    v = a.values
    rev = np.roll(v[::-1, ::-1], 1, axis=(0, 1))
    return LatticeSeq(np.conj(rev), a.lattice)


def sequence_norm(a: LatticeSeq, weight: WeightSpec, p: float) -> float:
    """Weighted ``l^p`` norm ``||a w||_p`` for ``p`` in ``{1, 2, inf}``."""
    aw = np.abs(a.values) * weight.on_lattice(a.lattice)
    p = float(p)
    if p == 1:
        return float(aw.sum())
    if p == 2:
        return float(np.sqrt((aw * aw).sum()))
    if math.isinf(p):
        return float(aw.max())
    raise ValueError(f"p must be 1, 2 or inf, got {p}")


def algebra_norm(a: LatticeSeq, spec: AlgebraSpec) -> float:
    if a.lattice != spec.lattice:
        raise ValueError("lattice mismatch")
    return sequence_norm(a, spec.weight, spec.q)


@dataclass(frozen=True)
class WeightReport:
    ok: bool
    worst_ratio: float


def check_algebra_weight(spec: AlgebraSpec) -> WeightReport:
    """Smallest constant ``C`` making ``l^q_w`` an algebra on the finite lattice.

    For ``q = 1`` this is ``max w(l+m) / (w(l) w(m))``; for ``q = inf`` it is
    ``max (w^-1 * w^-1)(l) / w^-1(l)``.  ``ok`` additionally requires the
    infinite-lattice admissibility of the weight (``s > 2`` for polynomial
    weights with ``q = inf``); on a finite group ``C`` itself is always finite.
    """
    lat = spec.lattice
    w = spec.weights.ravel()
    if spec.q == 1:
        wsum = w[lat.diff_index]  # w(l - m); l - m ranges over l + m' with m' = -m
        neg = involute(LatticeSeq(w.reshape(lat.shape), lat)).real.ravel()
        c = np.max(wsum / (w[:, None] * neg[None, :]))
    else:
        inv = LatticeSeq((1.0 / w).reshape(lat.shape), lat)
        c = np.max(convolve(inv, inv).real.ravel() * w)
    c = float(c)
    return WeightReport(ok=bool(np.isfinite(c)) and _weight_admissible(spec.weight, spec.q), worst_ratio=c)


def convolution_action_constant(spec: AlgebraSpec, y_weight: WeightSpec, p: float) -> float:
    """Smallest ``C`` with ``||a * c||_Y <= C ||a||_A ||c||_Y`` on the lattice.

    ``Y`` is ``l^p`` with weight ``y_weight``.  Exact: for ``q = 1`` the unit
    ball of ``A`` is spanned by scaled deltas, for ``q = inf`` the worst
    sequence is ``1/w`` itself.
    """
    lat = spec.lattice
    u = y_weight.on_lattice(lat).ravel()
    v = spec.weights.ravel()
    p = float(p)
    if spec.q == 1:
        # translation by mu on l^p_u has norm max_l u(l + mu)/u(l); same for every p
        diff = lat.diff_index  # [l', l] -> l' - l  (= mu when l' = l + mu)
        ka, kb = lat.shape
        ratios = u[:, None] / u[None, :]  # u(l')/u(l)
        per_mu = np.zeros(lat.size)
        np.maximum.at(per_mu, diff.ravel(), ratios.ravel())
        return float(np.max(per_mu / v))
    conv = (1.0 / v)[lat.diff_index]  # C[l, m] = v^-1(l - m)
    weighted = u[:, None] * conv / u[None, :]
    if p == 1:
        return float(weighted.sum(axis=0).max())
    if math.isinf(p):
        return float(weighted.sum(axis=1).max())
    if p == 2:
        return float(np.linalg.norm(weighted, 2))
    raise ValueError(f"p must be 1, 2 or inf, got {p}")


WeightLike = Union[WeightSpec, Callable[[np.ndarray], np.ndarray]]


def grs_profile(weight: WeightLike, lam, n_max: int = 50) -> np.ndarray:
    """``omega(n*lam)^(1/n)`` for ``n = 1..n_max`` on the unwrapped plane ``Z^2``.

    ``weight`` is a :class:`WeightSpec` or any callable taking integer points of
    shape ``(..., 2)``.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    lam = np.asarray(lam, dtype=float)
    n = np.arange(1, n_max + 1)
    if not np.any(lam):
        return np.ones(n_max)
    pts = n[:, None] * lam[None, :]
    w = weight.unwrapped(pts) if isinstance(weight, WeightSpec) else np.asarray(weight(pts), float)
    return w ** (1.0 / n)


@dataclass(frozen=True)
class L1MaxReport:
    l1: float
    sup_f: float
    rel_err: float


def l1_maximality_check(a, grid_m: int = 4096, offset: int = 0) -> L1MaxReport:
    """Compare ``||a||_1`` with the sup over a uniform grid of ``|F|a||``.

    ``a`` holds the values ``a(offset), a(offset+1), ...`` of a finitely
    supported sequence on ``Z``.
    """
    if grid_m < 64:
        raise ValueError("grid_m must be at least 64")
    mag = np.abs(np.asarray(a, dtype=complex))
    l1 = float(mag.sum())
    if l1 == 0:
        return L1MaxReport(0.0, 0.0, 0.0)
    k = offset + np.arange(mag.size)
    xi = np.arange(grid_m) / grid_m
    f = np.exp(-2j * np.pi * np.outer(xi, k)) @ mag
    sup_f = float(np.abs(f).max())
    return L1MaxReport(l1, sup_f, abs(l1 - sup_f) / l1)
