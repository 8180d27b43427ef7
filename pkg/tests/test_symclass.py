import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import rand_symbol
from tfpsi._rng import make_rng
from tfpsi.phase import periodized_gaussian, stft2, wigner
from tfpsi.presets import bump, default_symbol_window, random_bandlimited, rough, trig_poly
from tfpsi.seqalg import AlgebraSpec, PhaseLattice, WeightSpec, algebra_norm
from tfpsi.symclass import (
    amalgam_norm,
    compose_j,
    grand_symbol,
    hormander_profile,
    local_suprema,
    modspace_norm,
    sjostrand_norm,
    window_independence_check,
)

LAT = PhaseLattice(33, 3, 3)
LAT15 = PhaseLattice(15, 3, 1)
FLAT1 = AlgebraSpec(WeightSpec.flat(), 1, LAT)
seeds = st.integers(0, 2**31)


def test_grand_symbol_of_window():
    phi = rand_symbol(make_rng(1), 9)
    gs = grand_symbol(phi, phi).values
    assert gs[0, 0] == pytest.approx(np.vdot(phi, phi).real)
    assert gs.max() == pytest.approx(gs[0, 0])


def test_grand_symbol_of_constant_is_window_spectrum():
    # V_Phi 1(z, zeta) has modulus |Phi^(zeta)|, so the mass sits at and near zeta = 0
    phi = default_symbol_window(15)
    gs = grand_symbol(np.ones((15, 15)), phi).values
    assert np.allclose(gs, np.abs(np.fft.fft2(np.conj(phi))), atol=1e-11)
    assert gs.argmax() == 0


def test_grand_symbol_matches_scan_oracle():
    rng = make_rng(2)
    sigma, phi = rand_symbol(rng, 9), rand_symbol(rng, 9)
    ref = np.abs(oracles.stft2(sigma, phi)).max(axis=(0, 1))
    assert np.allclose(grand_symbol(sigma, phi).values, ref, atol=1e-11)


@given(seeds)
def test_grand_symbol_shift_invariant(seed):
    rng = make_rng(seed)
    sigma = rand_symbol(rng, 9)
    phi = default_symbol_window(9)
    u = rng.integers(0, 9, 2)
    moved = np.roll(sigma, tuple(u), axis=(0, 1))
    assert np.allclose(grand_symbol(moved, phi).values, grand_symbol(sigma, phi).values, atol=1e-11)
    # a modulation of sigma permutes the frequency variable
    t = np.arange(9)
    mod = sigma * np.exp(2j * np.pi * (2 * t[:, None] + 5 * t[None, :]) / 9)
    got = np.sort(grand_symbol(mod, phi).values.ravel())
    assert np.allclose(got, np.sort(grand_symbol(sigma, phi).values.ravel()), atol=1e-11)


def test_compose_j():
    f = np.arange(81.0).reshape(9, 9)
    fj = compose_j(f)
    for z in [(0, 0), (1, 2), (8, 3)]:
        assert fj[z] == f[z[1], (-z[0]) % 9]


def test_amalgam_examples():
    f = np.zeros((33, 33))
    f[7, 4] = 1.0  # cell of (6, 3)
    poly = AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT)
    w = WeightSpec.polynomial(3).of_radius(np.hypot(6, 3))
    assert amalgam_norm(f, LAT, poly) == pytest.approx(w)
    assert amalgam_norm(f, LAT, FLAT1) == 1.0
    flat_inf = AlgebraSpec(WeightSpec.flat(), math.inf, LAT, strict=False)
    assert amalgam_norm(np.ones((33, 33)), LAT, flat_inf) == 1.0
    with pytest.raises(ValueError):
        amalgam_norm(f, LAT15, FLAT1)


@given(seeds)
def test_local_suprema_matches_two_stage_scan(seed):
    f = make_rng(seed).uniform(0, 1, (15, 15))
    ref = np.zeros(LAT15.shape)
    for k in range(LAT15.shape[0]):
        for l in range(LAT15.shape[1]):
            ref[k, l] = f[3 * k:3 * k + 3, l:l + 1].max()
    assert np.array_equal(local_suprema(f, LAT15).real, ref)


@given(seeds)
def test_amalgam_norm_monotone(seed):
    rng = make_rng(seed)
    f1 = rng.uniform(0, 1, (33, 33))
    f2 = f1 + rng.uniform(0, 1, (33, 33))
    assert amalgam_norm(f1, LAT, FLAT1) <= amalgam_norm(f2, LAT, FLAT1)


def test_sjostrand_norm_zero_and_homogeneous(sys33):
    g = sys33.window
    assert sjostrand_norm(np.zeros((33, 33)), g, FLAT1).sjostrand_norm == 0.0
    sigma = random_bandlimited(33, 3.0, seed=1)
    a = sjostrand_norm(sigma, g, FLAT1).sjostrand_norm
    b = sjostrand_norm((2 - 1j) * sigma, g, FLAT1).sjostrand_norm
    assert b == pytest.approx(abs(2 - 1j) * a, rel=1e-12)


def test_sjostrand_norm_composition(sys33):
    g = sys33.window
    sigma = 1 + 0.3 * bump(33)
    gs = np.abs(stft2(sigma, wigner(g, g))).max(axis=(0, 1))
    ref = algebra_norm(local_suprema(compose_j(gs), LAT), FLAT1)
    rep = sjostrand_norm(sigma, g, FLAT1, threshold=1e6)
    assert rep.sjostrand_norm == pytest.approx(ref, rel=1e-13)
    assert rep.member
    d = rep.to_dict()
    assert d["q"] == 1 and d["member"] is True


def test_sjostrand_norm_degenerate_window():
    with pytest.raises(ValueError):
        sjostrand_norm(np.ones((33, 33)), np.zeros(33), FLAT1)


def test_modspace_examples():
    assert modspace_norm(np.zeros((15, 15)), 1, WeightSpec.flat()) == 0.0
    sigma = random_bandlimited(15, 2.0, seed=3)
    gs = grand_symbol(sigma, default_symbol_window(15)).values
    assert modspace_norm(sigma, math.inf, WeightSpec.flat()) == pytest.approx(gs.max())
    assert modspace_norm(sigma, 1, WeightSpec.flat()) >= gs.max()
    with pytest.raises(ValueError):
        modspace_norm(sigma, 2, WeightSpec.flat())


def test_modspace_and_sjostrand_norms_equivalent():
    lat = PhaseLattice(15, 3, 1)
    g = periodized_gaussian(15)
    spec = AlgebraSpec(WeightSpec.polynomial(3), math.inf, lat)
    ratios = []
    for seed in range(10):
        sigma = random_bandlimited(15, 3.0, seed=seed)
        ratios.append(modspace_norm(sigma, math.inf, WeightSpec.polynomial(3))
                      / sjostrand_norm(sigma, g, spec).sjostrand_norm)
    assert max(ratios) / min(ratios) < 10


def test_window_independence_trivial_cases(sys33):
    sigma = random_bandlimited(33, 3.0, seed=4)
    g = sys33.window
    assert window_independence_check(sigma, g, g, FLAT1) == 1.0
    assert window_independence_check(sigma, g, 3 * g, FLAT1) == pytest.approx(1 / 9, rel=1e-12)


def test_window_independence_spread(sys33):
    g1 = periodized_gaussian(33)
    ratios = [window_independence_check(random_bandlimited(33, 3.0, seed=s), g1, sys33.window, FLAT1)
              for s in range(20)]
    assert max(ratios) / min(ratios) < 10


def test_hormander_constant_symbol_matches_stft(sys33):
    prof = hormander_profile(np.ones((33, 33)), sys33.window)
    assert [r.s for r in prof.rows] == [0, 2, 4, 6, 8]
    assert all(math.isfinite(r.constant) for r in prof.rows)
    g = sys33.window
    from tfpsi.phase import stft
    assert np.allclose(prof.envelope.real, np.abs(stft(g, g)), atol=1e-12)


def test_hormander_rough_symbol_grows_faster(sys33):
    smooth = hormander_profile(trig_poly(33, 2, seed=7), sys33.window)
    wild = hormander_profile(rough(33, seed=1), sys33.window)
    growth = lambda p: p.rows[-1].constant / p.rows[0].constant
    assert growth(wild) > 100 * growth(smooth)
    assert wild.rows[0].fit.s_hat < smooth.rows[0].fit.s_hat


def test_hormander_trig_poly_envelope_beyond_distance_six(sys33):
    # Stated expectation for a degree-2 trig polynomial; not met on Z_33 (see notes).
    prof = hormander_profile(trig_poly(33, 2, seed=7), sys33.window)
    assert all(math.isfinite(r.constant) for r in prof.rows)
    assert prof.max_beyond(6) <= 1e-10
