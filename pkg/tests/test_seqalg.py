import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfpsi._rng import complex_normal, make_rng
from tfpsi.seqalg import (
    AlgebraSpec,
    LatticeSeq,
    PhaseLattice,
    WeightSpec,
    algebra_norm,
    check_algebra_weight,
    convolution_action_constant,
    convolve,
    grs_profile,
    involute,
    l1_maximality_check,
    periodic_abs,
    sequence_norm,
)

import oracles

LAT = PhaseLattice(33, 3, 3)
SMALL = PhaseLattice(15, 1, 3)
seeds = st.integers(0, 2**31)


def rand_seq(seed, lat=LAT):
    return LatticeSeq(complex_normal(make_rng(seed), lat.shape), lat)


def test_lattice_shape_and_points():
    assert LAT.shape == (11, 11)
    assert LAT.size == 121
    assert tuple(LAT.points[12]) == (3, 3)
    assert LAT.flat_index((3, 3)) == 12
    with pytest.raises(ValueError):
        LAT.flat_index((1, 0))


@pytest.mark.parametrize("args", [(32, 1, 1), (33, 2, 3), (33, 11, 3), (15, 5, 3)])
def test_lattice_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        PhaseLattice(*args)


def test_cell_labels_partition_grid():
    labels = SMALL.cell_labels()
    counts = np.bincount(labels.ravel(), minlength=SMALL.size)
    assert np.all(counts == SMALL.alpha * SMALL.beta)
    # every point sits in the box of its own cell
    x = np.arange(15)
    pts = SMALL.points[labels]
    assert np.all((x[:, None] - pts[..., 0]) % 15 < SMALL.alpha)
    assert np.all((x[None, :] - pts[..., 1]) % 15 < SMALL.beta)


def test_periodic_abs():
    assert list(periodic_abs(np.arange(7), 7)) == [0, 1, 2, 3, 3, 2, 1]


def test_convolve_delta_is_unit():
    a = rand_seq(1)
    assert convolve(a, LatticeSeq.delta(LAT)).allclose(a, atol=1e-13)
    assert convolve(LatticeSeq.delta(LAT), a).allclose(a, atol=1e-13)


def test_convolve_shifted_delta_translates():
    a = rand_seq(2)
    out = convolve(a, LatticeSeq.delta(LAT, (2, 5)))
    assert np.allclose(out.values, np.roll(a.values, (2, 5), axis=(0, 1)), atol=1e-13)


@given(seeds)
def test_convolve_matches_direct_sum(seed):
    a, b = rand_seq(seed, SMALL), rand_seq(seed + 1, SMALL)
    ref = oracles.lattice_convolve(a.values, b.values, SMALL)
    assert np.allclose(convolve(a, b).values, ref, atol=1e-12)


@given(seeds)
def test_convolve_commutative_and_associative(seed):
    a, b, c = rand_seq(seed), rand_seq(seed + 1), rand_seq(seed + 2)
    assert convolve(a, b).allclose(convolve(b, a), atol=1e-11)
    assert convolve(convolve(a, b), c).allclose(convolve(a, convolve(b, c)), atol=1e-9)


@given(seeds)
def test_involution_properties(seed):
    a, b = rand_seq(seed), rand_seq(seed + 7)
    assert involute(involute(a)).allclose(a, atol=0)
    # (a * b)^* = a^* * b^* on an abelian group
    assert involute(convolve(a, b)).allclose(convolve(involute(a), involute(b)), atol=1e-11)
    ka, kb = LAT.shape
    for k, l in [(0, 0), (1, 2), (10, 4)]:
        assert involute(a).values[k, l] == np.conj(a.values[-k % ka, -l % kb])


def test_involution_preserves_norms():
    a = rand_seq(4)
    for spec in (AlgebraSpec(WeightSpec.flat(), 1, LAT), AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT)):
        assert algebra_norm(involute(a), spec) == pytest.approx(algebra_norm(a, spec), rel=1e-14)


def test_algebra_norm_examples():
    flat1 = AlgebraSpec(WeightSpec.flat(), 1, LAT)
    assert algebra_norm(LatticeSeq.delta(LAT), flat1) == 1.0
    ones = LatticeSeq(np.ones(LAT.shape), LAT)
    assert algebra_norm(ones, flat1) == LAT.size
    poly = AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT)
    d = LatticeSeq.delta(LAT, (1, 0))
    assert algebra_norm(d, poly) == pytest.approx((1 + 9) ** 1.5)


def test_sequence_norm_p2_and_bad_p():
    a = rand_seq(5)
    assert sequence_norm(a, WeightSpec.flat(), 2) == pytest.approx(np.linalg.norm(a.values))
    with pytest.raises(ValueError):
        sequence_norm(a, WeightSpec.flat(), 3)


def test_algebra_spec_validation():
    with pytest.raises(ValueError):
        AlgebraSpec(WeightSpec.flat(), 2, LAT)
    with pytest.raises(ValueError):
        AlgebraSpec(WeightSpec.polynomial(1), math.inf, LAT)
    spec = AlgebraSpec.from_dict({"n": 33, "alpha": 3, "beta": 3, "weightKind": "polynomial", "s": 3, "q": "inf"})
    assert spec == AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT)
    assert AlgebraSpec.from_dict(spec.to_dict()) == spec


def test_weight_validation():
    with pytest.raises(ValueError):
        WeightSpec("gaussian")
    with pytest.raises(ValueError):
        WeightSpec.polynomial(-1)
    with pytest.raises(ValueError):
        WeightSpec.subexponential(0.2, 1.5)


def test_flat_l1_is_an_algebra_with_constant_one():
    rep = check_algebra_weight(AlgebraSpec(WeightSpec.flat(), 1, LAT))
    assert rep.ok and rep.worst_ratio == pytest.approx(1.0)


def test_inadmissible_weight_reports_not_ok():
    rep = check_algebra_weight(AlgebraSpec(WeightSpec.polynomial(1), math.inf, LAT, strict=False))
    assert not rep.ok
    assert math.isfinite(rep.worst_ratio)


@pytest.mark.parametrize("spec", [
    AlgebraSpec(WeightSpec.flat(), 1, LAT),
    AlgebraSpec(WeightSpec.polynomial(2), 1, LAT),
    AlgebraSpec(WeightSpec.subexponential(), 1, LAT),
    AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT),
])
def test_algebra_constant_bounds_random_products(spec):
    k = check_algebra_weight(spec).worst_ratio
    for seed in range(10):
        a, b = rand_seq(100 + seed), rand_seq(200 + seed)
        lhs = algebra_norm(convolve(a, b), spec)
        assert lhs <= k * algebra_norm(a, spec) * algebra_norm(b, spec) * (1 + 1e-12)


def test_algebra_constant_is_attained_for_q_inf():
    spec = AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT)
    inv = LatticeSeq(1.0 / spec.weights, LAT)
    k = check_algebra_weight(spec).worst_ratio
    assert algebra_norm(convolve(inv, inv), spec) == pytest.approx(k * algebra_norm(inv, spec) ** 2)


@pytest.mark.parametrize("p", [1, 2, math.inf])
@pytest.mark.parametrize("spec,yw", [
    (AlgebraSpec(WeightSpec.flat(), 1, LAT), WeightSpec.flat()),
    (AlgebraSpec(WeightSpec.polynomial(2), 1, LAT), WeightSpec.polynomial(1)),
    (AlgebraSpec(WeightSpec.polynomial(3), math.inf, LAT), WeightSpec.polynomial(1)),
])
def test_action_constant_bounds_convolution(spec, yw, p):
    k = convolution_action_constant(spec, yw, p)
    for seed in range(8):
        a, c = rand_seq(300 + seed), rand_seq(400 + seed)
        lhs = sequence_norm(convolve(a, c), yw, p)
        assert lhs <= k * algebra_norm(a, spec) * sequence_norm(c, yw, p) * (1 + 1e-12)


def test_action_constant_flat_l1_is_one():
    spec = AlgebraSpec(WeightSpec.flat(), 1, LAT)
    for p in (1, 2, math.inf):
        assert convolution_action_constant(spec, WeightSpec.flat(), p) == pytest.approx(1.0)


def test_grs_flat_is_all_ones():
    assert np.array_equal(grs_profile(WeightSpec.flat(), (1, 0), 20), np.ones(20))
    assert np.array_equal(grs_profile(WeightSpec.polynomial(3), (0, 0), 5), np.ones(5))


def test_grs_polynomial_tends_to_one():
    prof = grs_profile(WeightSpec.polynomial(3), (1, 0), 50)
    assert prof[-1] < 1.3
    assert np.all(np.diff(prof[-10:]) < 0)
    assert prof[-1] == pytest.approx(2501 ** (1.5 / 50), rel=1e-14)


def test_grs_exponential_weight_tends_to_two():
    prof = grs_profile(lambda p: 2.0 ** np.abs(p[..., 0]), (1, 0), 50)
    assert np.allclose(prof, 2.0)


def test_grs_subexponential_decreases():
    prof = grs_profile(WeightSpec.subexponential(0.5, 0.5), (1, 1), 50)
    assert np.all(np.diff(prof) < 0)


def test_l1_maximality_examples():
    rep = l1_maximality_check([1.0, -2.0, 0.5j], 4096)
    assert rep.l1 == pytest.approx(3.5)
    assert rep.rel_err <= 1e-12  # |a| is nonnegative so the sup sits at frequency 0
    assert l1_maximality_check([0, 0], 64).rel_err == 0.0
    with pytest.raises(ValueError):
        l1_maximality_check([1.0], 32)


@given(seeds)
def test_l1_maximality_random(seed):
    a = complex_normal(make_rng(seed), 40)
    rep = l1_maximality_check(a, 4096, offset=-20)
    assert rep.sup_f <= rep.l1 * (1 + 1e-12)
    assert rep.rel_err <= 1e-3
