# tests/test_geometry.py
import math

import numpy as np
import pytest

from src.geometry import (
    TorusPoint,
    TranslationSampler,
    axis_magnitudes,
    difference_operator,
    distance_from_identity,
    gradient_components,
    gradient_norm,
    intrinsic_distance,
    poincare_check,
    point_sample,
    pointwise_difference,
    verify_gaussian_bound,
)
from src.spectral import FrequencyLattice, GridField, SpectralField, WeightModel, eigenvalues, transform_inverse
from src.utils.numeric import log_grid


def test_diagonal_distance():
    w = WeightModel.explicit([1.0, 4.0])
    assert distance_from_identity([math.pi, math.pi], w) == pytest.approx(3.5124073, abs=1e-7)
    # дуговое расстояние: сдвиг на 2 pi - 0.1 эквивалентен 0.1
    assert distance_from_identity([2.0 * math.pi - 0.1, 0.0], w) == pytest.approx(0.1, rel=1e-12)
    assert distance_from_identity([0.0, 0.0], w) == 0.0


def test_matrix_distance():
    w = WeightModel.from_matrix([[2.0, 1.0], [1.0, 2.0]])
    assert distance_from_identity([math.pi / 2.0, 0.0], w) == pytest.approx(math.pi / math.sqrt(6.0), rel=1e-12)
    assert distance_from_identity([math.pi / 2.0, 0.0], w) == pytest.approx(1.2825498, abs=1e-7)


def test_matrix_distance_matches_diagonal_formula():
    diagonal = WeightModel.explicit([1.0, 3.0, 0.5])
    as_matrix = WeightModel.from_matrix(diagonal.gram)
    points = point_sample(3, 25, seed=4)
    np.testing.assert_allclose(distance_from_identity(points, as_matrix),
                               distance_from_identity(points, diagonal), rtol=1e-12)


@pytest.mark.parametrize("weights", ["explicit:1,2,4", "matrix:2,1,0;1,2,0;0,0,1"])
def test_distance_is_a_metric(weights):
    w = WeightModel.from_spec(weights, 3)
    points = point_sample(3, 6, seed=9)
    for x in points:
        assert intrinsic_distance(x, x, w) == pytest.approx(0.0, abs=1e-12)
        for y in points:
            dxy = intrinsic_distance(x, y, w)
            assert dxy == pytest.approx(intrinsic_distance(y, x, w), rel=1e-12)
            for z in points:
                assert dxy <= intrinsic_distance(x, z, w) + intrinsic_distance(z, y, w) + 1e-12


def test_intrinsic_distance_is_left_invariant():
    w = WeightModel.explicit([1.0, 4.0])
    x = TorusPoint.of([0.5, 6.0])
    y = TorusPoint.of([3.0, 1.0])
    z = TorusPoint.of([1.3, 2.2])
    assert intrinsic_distance(z + x, z + y, w) == pytest.approx(intrinsic_distance(x, y, w), rel=1e-12)
    assert intrinsic_distance(x, y, w) == pytest.approx(distance_from_identity((y - x).as_array(), w), rel=1e-12)
    with pytest.raises(ValueError):
        intrinsic_distance(np.zeros(2), np.zeros(3), w)


def test_torus_point_reduction():
    point = TorusPoint.of([-0.5, 7.0])
    assert point.d == 2
    np.testing.assert_allclose(point.as_array(), [2.0 * math.pi - 0.5, 7.0 - 2.0 * math.pi])
    assert TorusPoint.identity(3).coordinates == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_difference_operator_matches_pointwise_form(torus3, smooth_field, k):
    _, lattice = torus3
    steps = (3, 0, 5)
    y = [2.0 * math.pi * s / n for s, n in zip(steps, lattice.grid_shape)]
    spectral = transform_inverse(difference_operator(smooth_field, y, k)).samples
    pointwise = pointwise_difference(transform_inverse(smooth_field), steps, k)
    np.testing.assert_allclose(spectral, pointwise, atol=1e-12)


def test_difference_operator_orders(torus3, smooth_field):
    _, lattice = torus3
    y = TorusPoint.of([0.7, -0.2, 1.9])
    twice = difference_operator(difference_operator(smooth_field, y, 1), y, 1)
    assert difference_operator(smooth_field, y, 2).max_difference(twice) < 1e-14
    grid = difference_operator(transform_inverse(smooth_field), y, 1)
    assert isinstance(grid, GridField)
    np.testing.assert_allclose(grid.samples, transform_inverse(difference_operator(smooth_field, y, 1)).samples,
                               atol=1e-12)
    with pytest.raises(ValueError):
        difference_operator(smooth_field, y, 0)
    with pytest.raises(ValueError):
        difference_operator(smooth_field, [0.1, 0.2], 1)


def test_difference_of_constant_vanishes(circle):
    _, lattice = circle
    constant = SpectralField.constant(lattice, 2.5)
    assert difference_operator(constant, [1.1], 1).is_zero()


def test_gradient_l2_norm_is_dirichlet_form(torus3, smooth_field, matrix_model):
    w, lattice = torus3
    energy = float(np.sum(eigenvalues(lattice.frequencies, w) * np.abs(smooth_field.coefficients) ** 2))
    assert gradient_norm(smooth_field, w, 2.0).value == pytest.approx(math.sqrt(energy), rel=1e-12)
    assert len(gradient_components(smooth_field, w)) == 3

    w, lattice = matrix_model
    f = SpectralField.cosine(lattice, (1, 1))
    # |X_1 cos|^2 + |X_2 cos|^2 = lambda(n) sin^2(n.x), lambda = 6
    assert gradient_norm(f, w, math.inf).value == pytest.approx(math.sqrt(6.0), rel=1e-10)


def test_translation_sampler_closed_under_doubling():
    sampler = TranslationSampler(n_random=30, seed=2)
    points = sampler.integer_sample(2)
    members = set(points)
    assert len(points) == len(members)
    for point in points:
        doubled = tuple((2 * v) % sampler.modulus for v in point)
        assert doubled in members
    shifts = sampler.sample(2)
    assert shifts.shape == (len(points), 2)
    assert np.all((shifts >= 0) & (shifts < 2.0 * math.pi))
    assert set(sampler.coarse().integer_sample(2)) <= members


def test_axis_magnitudes():
    magnitudes = axis_magnitudes()
    assert np.all(np.diff(magnitudes) > 0)
    assert magnitudes[0] == pytest.approx(2.0 * math.pi / 4095)
    assert magnitudes[-1] <= math.pi


def test_gaussian_bound():
    w = WeightModel.power(0.5, 3)
    points = point_sample(3, 40, seed=1, include=[[math.pi, math.pi, math.pi]])
    report = verify_gaussian_bound(w, 0.5, log_grid(1e-3, 1.0, 10), points)
    assert report.passed
    assert report.constants["A"] == pytest.approx(2.0 * report.constants["A0"], rel=0.2)
    assert report.constants["C"] >= report.constants["C_required"]
    assert "gaussian_frontier" in report.tables
    with pytest.raises(ValueError):
        verify_gaussian_bound(w, 1.5, [1.0], points)


def test_poincare(torus3, smooth_field):
    w, _ = torus3
    shifts = TranslationSampler(n_random=10).sample(3)[:40]
    for p in (1.0, 2.0, math.inf):
        assert poincare_check(smooth_field, w, shifts, p).passed
