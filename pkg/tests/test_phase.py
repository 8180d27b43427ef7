import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import rand_signal, rand_symbol
from tfpsi._rng import complex_normal, make_rng
from tfpsi.phase import (
    GaborSystem,
    analysis,
    frame_operator,
    half,
    j_map,
    magic_formula_check,
    periodic_length,
    periodized_gaussian,
    pointwise_domination,
    stft,
    stft2,
    synthesis,
    tf_shift,
    tighten,
    wigner,
)
from tfpsi.seqalg import LatticeSeq, PhaseLattice

seeds = st.integers(0, 2**31)


def delta(n, k=0):
    d = np.zeros(n, complex)
    d[k] = 1
    return d


def test_half_is_inverse_of_two():
    for n in (3, 9, 15, 33):
        assert (2 * half(n)) % n == 1
    with pytest.raises(ValueError):
        half(10)


def test_tf_shift_trivial_cases():
    f = rand_signal(make_rng(0), 15)
    assert np.array_equal(tf_shift((0, 0), f), f)
    assert np.array_equal(tf_shift((4, 0), delta(15)), delta(15, 4))


@given(seeds)
def test_tf_shift_matches_oracle_and_composes(seed):
    rng = make_rng(seed)
    f = rand_signal(rng, 15)
    z, w = rng.integers(0, 15, 2), rng.integers(0, 15, 2)
    assert np.allclose(tf_shift(z, f), oracles.tf_shift(tuple(z), f), atol=1e-12)
    lhs = tf_shift(z, tf_shift(w, f))
    rhs = tf_shift((z + w) % 15, f)
    ratio = lhs[np.abs(rhs) > 1e-8] / rhs[np.abs(rhs) > 1e-8]
    assert np.allclose(ratio, ratio[0]) and abs(abs(ratio[0]) - 1) < 1e-12


def test_stft_trivial_values():
    g = rand_signal(make_rng(1), 15)
    assert stft(g, g)[0, 0] == pytest.approx(np.vdot(g, g))
    with pytest.raises(ValueError, match="degenerate window"):
        stft(g, np.zeros(15))


@given(seeds)
def test_stft_orthogonality_relation(seed):
    rng = make_rng(seed)
    f, g = rand_signal(rng, 15), rand_signal(rng, 15)
    total = np.sum(np.abs(stft(f, g)) ** 2)
    assert total == pytest.approx(15 * np.vdot(g, g).real * np.vdot(f, f).real, rel=1e-12)


def test_stft_matches_oracle():
    rng = make_rng(2)
    f, g = rand_signal(rng, 15), rand_signal(rng, 15)
    assert np.allclose(stft(f, g), oracles.stft(f, g), atol=1e-12)


@given(seeds)
def test_stft_covariance_of_moduli(seed):
    rng = make_rng(seed)
    f, g = rand_signal(rng, 15), rand_signal(rng, 15)
    w = rng.integers(0, 15, 2)
    lhs = np.abs(stft(tf_shift(w, f), g))
    rhs = np.roll(np.abs(stft(f, g)), tuple(w), axis=(0, 1))
    assert np.allclose(lhs, rhs, atol=1e-11)


def test_stft2_trivial_values():
    phi = rand_symbol(make_rng(3), 9)
    assert stft2(phi, phi)[0, 0, 0, 0] == pytest.approx(np.vdot(phi, phi))
    point = np.zeros((9, 9), complex)
    point[2, 5] = 1
    v = stft2(point, point)
    assert np.allclose(np.abs(v[0, 0]), 1.0)
    assert np.count_nonzero(np.abs(v) > 1e-12) == 81
    with pytest.raises(ValueError, match="degenerate window"):
        stft2(phi, np.zeros((9, 9)))


def test_stft2_matches_oracle():
    rng = make_rng(4)
    sigma, phi = rand_symbol(rng, 9), rand_symbol(rng, 9)
    assert np.allclose(stft2(sigma, phi), oracles.stft2(sigma, phi), atol=1e-11)


def test_wigner_matches_oracle_and_symmetry():
    rng = make_rng(5)
    f, g = rand_signal(rng, 15), rand_signal(rng, 15)
    w = wigner(f, g)
    assert np.allclose(w, oracles.wigner(f, g), atol=1e-12)
    assert np.allclose(w, np.conj(wigner(g, f)), atol=1e-12)


@given(seeds)
def test_wigner_frequency_marginal(seed):
    f = rand_signal(make_rng(seed), 15)
    assert np.allclose(wigner(f, f).sum(axis=1), 15 * np.abs(f) ** 2, atol=1e-11)


def test_frame_operator_full_lattice():
    g = rand_signal(make_rng(6), 15)
    s = frame_operator(g, PhaseLattice(15, 1, 1))
    assert np.allclose(s, 15 * np.vdot(g, g).real * np.eye(15), atol=1e-12)


def test_frame_operator_of_delta_is_diagonal():
    s = frame_operator(delta(33), PhaseLattice(33, 1, 3))
    assert np.allclose(s, np.diag(np.diag(s)), atol=1e-13)


def test_frame_operator_matches_oracle():
    lat = PhaseLattice(33, 3, 3)
    g = rand_signal(make_rng(7), 33)
    s = frame_operator(g, lat)
    assert np.allclose(s, oracles.frame_operator(g, lat), atol=1e-11)
    assert np.allclose(s, s.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(s).min() > -1e-12


def test_tighten_gaussian(sys33):
    assert sys33.tight
    rng = make_rng(8)
    for _ in range(20):
        f = rand_signal(rng, 33)
        c = analysis(sys33, f)
        assert abs(np.vdot(c.flat, c.flat).real - np.vdot(f, f).real) <= 1e-10 * np.vdot(f, f).real


def test_tighten_is_idempotent(sys33):
    again = tighten(sys33.window, sys33.lattice)
    assert np.allclose(again.window, sys33.window, atol=1e-10)


def test_tighten_delta_on_covering_lattice():
    sys = tighten(delta(33), PhaseLattice(33, 1, 3))
    assert sys.tight
    assert np.allclose(frame_operator(delta(33), sys.lattice), 11 * np.eye(33))


def test_tighten_delta_on_sparse_time_lattice_fails():
    # pi(3k, l) delta_0 only reaches positions that are multiples of 3
    with pytest.raises(ValueError, match="does not generate a frame"):
        tighten(delta(33), PhaseLattice(33, 3, 1))


def test_untight_system_flag():
    sys = GaborSystem.from_window(2 * periodized_gaussian(33), PhaseLattice(33, 3, 3))
    assert not sys.tight


def test_analysis_examples(sys33):
    g = sys33.window
    c = analysis(sys33, g)
    assert c.flat[0] == pytest.approx(np.vdot(g, g))
    v = stft(g, g)
    pts = sys33.lattice.points
    assert np.allclose(np.abs(c.flat), np.abs(v[pts[:, 0], pts[:, 1]]), atol=1e-13)
    f = rand_signal(make_rng(9), 33)
    assert np.allclose(analysis(sys33, f).flat, stft(f, g)[pts[:, 0], pts[:, 1]], atol=1e-12)


def test_synthesis_examples(sys33):
    lat = sys33.lattice
    f = rand_signal(make_rng(10), 33)
    assert np.allclose(synthesis(sys33, analysis(sys33, f)), f, atol=1e-10)
    d = LatticeSeq.delta(lat, (2, 7))
    assert np.allclose(synthesis(sys33, d), tf_shift(lat.points[lat.flat_index((6, 21))], sys33.window))
    c = complex_normal(make_rng(11), lat.size)
    c_perp = c - sys33.range_projector @ c
    assert np.abs(synthesis(sys33, LatticeSeq(c_perp, lat))).max() <= 1e-10


def test_magic_formula_gaussian():
    rep = magic_formula_check(periodized_gaussian(15))
    assert rep.max_rel_err <= 1e-10
    assert rep.constant == 15


def test_magic_formula_delta_n9():
    assert magic_formula_check(delta(9)).max_rel_err <= 1e-10


@given(seeds)
def test_magic_formula_random_window(seed):
    assert magic_formula_check(rand_signal(make_rng(seed), 9)).max_rel_err <= 1e-10


@given(seeds)
def test_pointwise_domination(seed):
    rng = make_rng(seed)
    f, g, h, k = (rand_signal(rng, 15) for _ in range(4))
    assert pointwise_domination(f, g, h, k) <= 1e-10
    assert pointwise_domination(f, g, h, k, sharp=True) <= 1e-10


def test_pointwise_domination_needs_overlap():
    g = delta(15)
    with pytest.raises(ValueError):
        pointwise_domination(g, g, g, delta(15, 3))


@given(st.integers(0, 32), st.integers(0, 32))
def test_j_is_isometry(a, b):
    z = np.array([a, b])
    assert periodic_length(j_map(z, 33), 33) == pytest.approx(periodic_length(z, 33))
