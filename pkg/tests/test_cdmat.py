import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from tfpsi._rng import complex_normal, make_rng
from tfpsi.cdmat import (
    CDMatrix,
    apply,
    cda_norm,
    decay_fit,
    diagonal_fourier_check,
    envelope,
    envelope_product_bound,
    penrose_residuals,
    perturbed_identity,
    pinv,
)
from tfpsi.seqalg import AlgebraSpec, LatticeSeq, PhaseLattice, WeightSpec, convolve, involute, sequence_norm

LAT = PhaseLattice(33, 3, 3)
SMALL = PhaseLattice(15, 1, 3)
FLAT1 = AlgebraSpec(WeightSpec.flat(), 1, LAT)
seeds = st.integers(0, 2**31)


def rand_matrix(seed, lat=LAT, decay=None):
    m = complex_normal(make_rng(seed), (lat.size, lat.size))
    if decay is not None:
        m = m * (1 + lat.radii.ravel() ** 2)[lat.diff_index] ** (-decay / 2)
    return CDMatrix(m, lat)


def test_identity_envelope_is_delta():
    assert envelope(CDMatrix.identity(LAT)).allclose(LatticeSeq.delta(LAT), atol=0)


def test_circulant_envelope_is_modulus():
    a = LatticeSeq(complex_normal(make_rng(3), LAT.shape), LAT)
    assert np.allclose(CDMatrix.circulant(a).envelope.values, np.abs(a.values))


@given(seeds)
def test_envelope_matches_oracle(seed):
    m = rand_matrix(seed, SMALL)
    assert np.allclose(m.envelope.values, oracles.envelope(m.entries, SMALL), atol=0)


def test_cda_norm_of_identity():
    assert cda_norm(CDMatrix.identity(LAT), FLAT1) == 1.0
    poly = AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT)
    assert cda_norm(CDMatrix.identity(LAT), poly) == 1.0


def test_cda_norm_lattice_mismatch():
    with pytest.raises(ValueError):
        cda_norm(CDMatrix.identity(SMALL), FLAT1)


@given(seeds)
def test_envelope_product_bound(seed):
    a, b = rand_matrix(seed, decay=3), rand_matrix(seed + 1, decay=2)
    rep = envelope_product_bound(a, b)
    assert rep.max_violation <= 1e-12 * rep.scale


def test_product_bound_equality_for_nonnegative_circulants():
    rng = make_rng(11)
    a = LatticeSeq(rng.uniform(0, 1, LAT.shape), LAT)
    b = LatticeSeq(rng.uniform(0, 1, LAT.shape), LAT)
    prod = CDMatrix.circulant(a) @ CDMatrix.circulant(b)
    assert np.allclose(prod.envelope.values, convolve(a, b).real, rtol=1e-12)


@pytest.mark.parametrize("p", [1, 2, math.inf])
@pytest.mark.parametrize("spec,yw", [
    (FLAT1, WeightSpec.flat()),
    (AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT), WeightSpec.polynomial(1)),
])
def test_apply_bound(spec, yw, p):
    for seed in range(5):
        m = rand_matrix(50 + seed, decay=4)
        c = LatticeSeq(complex_normal(make_rng(60 + seed), LAT.shape), LAT)
        out, rep = apply(m, c, spec, yw, p)
        assert np.allclose(out.flat, m.entries @ c.flat)
        assert rep.ok
        assert rep.lhs == pytest.approx(sequence_norm(out, yw, p))


def test_pinv_of_invertible_is_inverse():
    m = perturbed_identity(LAT, seed=1)
    assert np.allclose(pinv(m).entries, np.linalg.inv(m.entries), atol=1e-12)


def test_pinv_of_projection_is_itself():
    q, _ = np.linalg.qr(complex_normal(make_rng(2), (LAT.size, 30)))
    p = CDMatrix(q @ q.conj().T, LAT)
    assert np.allclose(pinv(p).entries, p.entries, atol=1e-12)


def test_pinv_zero_and_rtol():
    z = CDMatrix(np.zeros((LAT.size, LAT.size)), LAT)
    assert not np.any(pinv(z).entries)
    with pytest.raises(ValueError):
        pinv(z, rtol=0.5)


@given(seeds)
def test_penrose_identities_rank_deficient(seed):
    rng = make_rng(seed)
    a = complex_normal(rng, (SMALL.size, 20)) @ complex_normal(rng, (20, SMALL.size))
    m = CDMatrix(a, SMALL)
    x = pinv(m).entries
    assert max(penrose_residuals(a, x)) < 1e-10
    assert np.allclose(pinv(pinv(m)).entries, a, atol=1e-9 * np.abs(a).max())


def test_decay_fit_exact_power_law():
    d = LatticeSeq(3.0 * (1 + LAT.radii**2) ** -2.5, LAT)
    fit = decay_fit(d)
    assert fit.s_hat == pytest.approx(5.0, abs=1e-10)
    assert fit.c_hat == pytest.approx(3.0, rel=1e-10)
    assert fit.residual < 1e-10


def test_decay_fit_rejects_tiny_support():
    with pytest.raises(ValueError):
        decay_fit(LatticeSeq.delta(LAT))
    with pytest.raises(ValueError):
        decay_fit(LatticeSeq.delta(LAT), min_dist=0.5)


def test_perturbed_identity_bound_and_inverse_decay():
    m = perturbed_identity(LAT, amplitude=0.1, s=4.0, seed=0)
    k = m.entries - np.eye(LAT.size)
    bound = (0.1 * (1 + LAT.radii.ravel() ** 2) ** -2)[LAT.diff_index]
    assert np.all(np.abs(k) <= bound + 1e-16)
    assert decay_fit(pinv(m).envelope).s_hat >= 3.5


@pytest.mark.parametrize("seed", [0, 1])
def test_diagonal_fourier_recovers_diagonals(seed):
    rep = diagonal_fourier_check(rand_matrix(seed, decay=2), 11)
    assert rep.max_err <= 1e-10
    assert rep.n_coefficients == 121


def test_diagonal_fourier_needs_common_period():
    with pytest.raises(ValueError):
        diagonal_fourier_check(CDMatrix.identity(LAT), 7)


def test_cdmatrix_shape_checks():
    with pytest.raises(ValueError):
        CDMatrix(np.eye(3), LAT)
    with pytest.raises(ValueError):
        CDMatrix.identity(LAT) @ CDMatrix.identity(SMALL)
    m = rand_matrix(9)
    assert np.allclose(m.adjoint().entries, m.entries.conj().T)
    assert m.adjoint().envelope.allclose(involute(m.envelope), atol=1e-14)
