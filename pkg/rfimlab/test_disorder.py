import math

import numpy as np
import pytest

from rfimlab.exceptions import ParameterError, PreconditionError, RegionMismatchError
from rfimlab.physics.disorder import (
    AnnulusShift,
    FieldSample,
    GlobalShift,
    PerturbationParams,
    RandomShift,
    annulus_delta,
    perturb,
    region_sum,
    rn_derivative,
    sample_field,
    unperturb,
)
from rfimlab.physics.lattice import ORIGIN, SiteSet, Vertex, annulus, box


def test_zero_epsilon_is_rejected():
    with pytest.raises(PreconditionError):
        sample_field(box(1), 0.0, 1, 0)


def test_nested_regions_see_the_same_disorder():
    big = sample_field(box(4), 1.0, 7, 3)
    small = sample_field(box(2), 1.0, 7, 3)
    np.testing.assert_allclose(big.restrict(box(2)).values, small.values, rtol=1e-12, atol=0)
    assert big.value(Vertex(1, -2)) == pytest.approx(small.value(Vertex(1, -2)), rel=1e-12)


def test_replicas_differ_and_repeat():
    a = sample_field(box(3), 1.0, 11, 0)
    b = sample_field(box(3), 1.0, 11, 1)
    again = sample_field(box(3), 1.0, 11, 0)
    assert not np.array_equal(a.values, b.values)
    assert np.array_equal(a.values, again.values)


def test_gaussian_moments():
    field = sample_field(box(158), 1.0, 20190615, 0)
    vals = field.values.ravel()
    assert vals.size > 100_000
    assert abs(vals.mean()) < 0.02
    assert abs(vals.var() - 1.0) < 0.05


def test_epsilon_scales_the_base_field():
    one = sample_field(box(2), 1.0, 5, 2)
    three = sample_field(box(2), 3.0, 5, 2)
    np.testing.assert_allclose(three.values, 3.0 * one.values)


def test_global_shift_adds_delta_everywhere():
    field = sample_field(box(1), 1.0, 3, 0)
    shifted = perturb(field, GlobalShift(delta=0.25))
    np.testing.assert_allclose(shifted.values - field.values, 0.25)


def test_annulus_shift_leaves_outside_untouched():
    field = sample_field(box(16), 1.0, 3, 0)
    ring = annulus(4, 2)
    shifted = perturb(field, AnnulusShift(delta=0.5, annulus=ring))
    inside = ring.sites().reframe(field.window).mask
    assert np.array_equal(shifted.values[~inside], field.values[~inside])
    np.testing.assert_allclose(shifted.values[inside] - field.values[inside], 0.5)


def test_annulus_outside_region_raises():
    field = sample_field(box(2), 1.0, 3, 0)
    with pytest.raises(RegionMismatchError):
        perturb(field, AnnulusShift(delta=0.5, annulus=annulus(4, 2)))


def test_successive_shifts_add_up():
    field = sample_field(box(2), 1.0, 3, 0)
    twice = perturb(perturb(field, GlobalShift(delta=0.1)), GlobalShift(delta=0.2))
    once = perturb(field, GlobalShift(delta=0.3))
    np.testing.assert_allclose(twice.values, once.values)


def test_unperturb_inverts_perturb():
    field = sample_field(box(3), 2.0, 9, 4)
    spec = RandomShift(amplitude=1.0)
    np.testing.assert_allclose(unperturb(perturb(field, spec), spec).values, field.values, atol=1e-12)


def test_random_shift_is_nonnegative_and_keyed():
    field = sample_field(box(3), 1.0, 9, 4)
    x1 = perturb(field, RandomShift(amplitude=0.5)).shift
    x2 = perturb(field, RandomShift(amplitude=0.5)).shift
    assert np.array_equal(x1, x2)
    assert x1.min() >= 0.0 and x1.max() < 0.5


def test_region_sum():
    field = sample_field(box(1), 1.0, 2, 0)
    assert region_sum(field, SiteSet.empty(field.window)) == 0.0
    assert region_sum(field, [ORIGIN]) == field.value(ORIGIN)
    shifted = perturb(field, GlobalShift(delta=0.5))
    assert region_sum(shifted, box(1)) == pytest.approx(region_sum(field, box(1)) + 9 * 0.5)
    with pytest.raises(RegionMismatchError):
        region_sum(field, box(2))


def test_rn_derivative_hand_values():
    one = FieldSample.from_values(box(0), np.array([[1.0]]))
    two = FieldSample.from_values(box(0), np.array([[2.0]]))
    assert rn_derivative(one, 1.0, box(0), 1.0) == pytest.approx(math.exp(-0.5))
    assert rn_derivative(two, 1.0, box(0), 1.0) == pytest.approx(math.exp(-1.5))
    assert rn_derivative(two, 1e-12, box(0), 1.0) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        rn_derivative(one, 0.0, box(0), 1.0)


def test_from_values_checks_shape():
    with pytest.raises(RegionMismatchError):
        FieldSample.from_values(box(1), np.zeros((2, 2)))


def test_quantized_is_additive_under_shifts():
    field = sample_field(box(2), 1.0, 8, 1)
    scale = 1 << 20
    shifted = perturb(field, GlobalShift(delta=0.25))
    assert np.array_equal(shifted.quantized(scale) - field.quantized(scale), np.full((5, 5), scale // 4))


def test_perturbation_params():
    p = PerturbationParams.box_scale(16, 100.0)
    assert p.K == 4.0 and p.delta == 6.25
    g = PerturbationParams.geodesic_scale(16, 1.5, 0.9)
    assert g.K == pytest.approx(16**1.35)
    assert g.delta == pytest.approx(16 ** (-1.5 * 0.81))
    with pytest.raises(ValueError):
        PerturbationParams(K=1.0, delta=1.0, alpha=1.5, alpha_prime=0.5)
    assert annulus_delta(32, 1.5, 0.9) == pytest.approx(2 ** (-1.215))
