# tests/test_spectral.py
import math

import numpy as np
import pytest

from src.spectral import (
    DecayProfile,
    FrequencyLattice,
    GridField,
    RankOneLatticeRule,
    SpectralField,
    TensorGridRule,
    WeightModel,
    apply_multiplier,
    direction_symbol,
    eigenvalue,
    eigenvalues,
    lp_norm,
    quadrature_for,
    random_field,
    read_field_csv,
    transform_forward,
    transform_inverse,
    trial_dictionary,
    vector_lp_norm,
    write_field_csv,
)


@pytest.mark.parametrize("spec, dimension, expected", [
    ("power:0.5", 3, [1.0, 4.0, 9.0]),
    ("power:1", 2, [1.0, 2.0]),
    ("geometric:1", 3, [2.0, 4.0, 8.0]),
    ("explicit:1,2,4", None, [1.0, 2.0, 4.0]),
])
def test_weight_specs(spec, dimension, expected):
    w = WeightModel.from_spec(spec, dimension)
    np.testing.assert_allclose(w.weights, expected)
    assert w.is_diagonal
    assert WeightModel.from_spec(w.spec, w.dimension).weights.tolist() == w.weights.tolist()


def test_matrix_weights_factor():
    w = WeightModel.from_spec("matrix:2,1;1,2")
    assert not w.is_diagonal
    assert w.dimension == 2
    np.testing.assert_allclose(w.factor.T @ w.factor, w.gram, atol=1e-14)
    np.testing.assert_allclose(w.gram @ w.gram_inverse, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("spec", [
    "power:-1",
    "power:",
    "geometric:0",
    "explicit:1,-2",
    "unknown:1",
    "matrix:1,2;3,4",
    "matrix:1,0;0,-1",
    "matrix:1,2,3",
])
def test_invalid_weight_specs(spec):
    with pytest.raises(ValueError):
        WeightModel.from_spec(spec, 2)


def test_explicit_weights_shorter_than_dimension():
    with pytest.raises(ValueError):
        WeightModel.from_spec("explicit:1,4", 3)


def test_default_bandwidths():
    w = WeightModel.power(0.5, 3)
    assert w.default_bandwidths(8) == (8, 4, 3)
    lattice = FrequencyLattice.for_weights(w, 8)
    assert lattice.shape == (17, 9, 7)
    assert lattice.grid_shape == (18, 10, 8)
    assert FrequencyLattice.for_weights(w, 8, [2, 2, 2]).bandwidths == (2, 2, 2)


def test_power_weights_are_unbounded_in_index():
    w = WeightModel.power(0.5, 2)
    assert w.weight(10) == pytest.approx(100.0)
    with pytest.raises(IndexError):
        WeightModel.explicit([1.0, 2.0]).weight(3)


def test_lattice_budget_and_indexing():
    with pytest.raises(ValueError):
        FrequencyLattice.uniform(8, 8)
    with pytest.raises(ValueError):
        FrequencyLattice((2, 0))
    lattice = FrequencyLattice((2, 3))
    assert lattice.index_of((0, 0)) == lattice.zero_index == (2, 3)
    assert lattice.index_of((-2, 3)) == (0, 6)
    assert lattice.contains((1, -3))
    assert not lattice.contains((3, 0))
    with pytest.raises(ValueError):
        lattice.index_of((3, 0))
    assert len(list(lattice.points())) == lattice.size == 35


def test_symbols(matrix_model):
    w, _ = matrix_model
    assert eigenvalue((1, 1), w) == pytest.approx(6.0)
    value = direction_symbol(1, (1, 1), w)
    assert value.real == pytest.approx(0.0)
    assert value.imag == pytest.approx(3.0 / math.sqrt(2.0))
    with pytest.raises(IndexError):
        direction_symbol(3, (1, 1), w)

    diagonal = WeightModel.explicit([1.0, 4.0])
    assert eigenvalue((2, 1), diagonal) == pytest.approx(8.0)
    assert direction_symbol(2, (2, 1), diagonal).imag == pytest.approx(2.0)


def test_apply_multiplier():
    w = WeightModel.explicit([1.0, 4.0])
    lattice = FrequencyLattice((3, 3))
    f = SpectralField.cosine(lattice, (1, 0)) + SpectralField.cosine(lattice, (0, 1))

    def inverse(n):
        values = eigenvalues(n, w)
        return np.divide(1.0, values, out=np.zeros_like(values), where=values > 0)

    expected = SpectralField.cosine(lattice, (1, 0)) + SpectralField.cosine(lattice, (0, 1)) * 0.25
    assert apply_multiplier(f, inverse).max_difference(expected) < 1e-15
    # 1/lambda без обнуления в n = 0 не конечен
    with pytest.raises(ValueError):
        apply_multiplier(f, lambda n: 1.0 / eigenvalues(n, w))


def test_field_constructors(circle):
    _, lattice = circle
    cos = SpectralField.cosine(lattice, (1,))
    sin = SpectralField.sine(lattice, (1,))
    assert cos.is_real() and sin.is_real()
    assert cos.is_mean_zero()
    assert cos.l2_norm() == pytest.approx(1.0 / math.sqrt(2.0))
    assert SpectralField.constant(lattice, 3.0).mean == 3.0
    assert SpectralField.zeros(lattice).is_zero()
    assert not SpectralField.character(lattice, (1,)).is_real()
    # cos(x + pi/2) = -sin x
    assert cos.translated([math.pi / 2.0]).max_difference(-sin) < 1e-15
    with pytest.raises(ValueError):
        cos + SpectralField.zeros(FrequencyLattice((5,)))


def test_embedding_keeps_common_band(torus3, smooth_field):
    _, lattice = torus3
    small = smooth_field.embedded(FrequencyLattice((4, 4, 4)))
    back = small.embedded(lattice)
    assert back.lattice == lattice
    assert back.coefficients[lattice.zero_index] == smooth_field.coefficients[lattice.zero_index]
    inner = tuple(slice(4, 13) for _ in range(3))
    np.testing.assert_array_equal(back.coefficients[inner], smooth_field.coefficients[inner])
    assert back.l2_norm() <= smooth_field.l2_norm()


def test_transform_round_trip_and_parseval(smooth_field):
    grid = transform_inverse(smooth_field)
    assert isinstance(grid, GridField)
    assert grid.samples.shape == smooth_field.lattice.grid_shape
    assert not np.iscomplexobj(grid.samples)
    restored = transform_forward(grid)
    assert restored.max_difference(smooth_field) < 1e-12
    grid_l2 = math.sqrt(float(np.mean(grid.samples ** 2)))
    assert grid_l2 == pytest.approx(smooth_field.l2_norm(), rel=1e-12)
    assert lp_norm(grid, 2) == pytest.approx(smooth_field.l2_norm(), rel=1e-12)


def test_cosine_norms(circle):
    _, lattice = circle
    cos = SpectralField.cosine(lattice, (1,))
    assert lp_norm(cos, 2) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)
    assert lp_norm(cos, math.inf) == pytest.approx(1.0, rel=1e-12)
    assert lp_norm(cos, 1) == pytest.approx(2.0 / math.pi, rel=1e-3)
    assert lp_norm(SpectralField.zeros(lattice), 3) == 0.0


def test_norm_errors(circle):
    _, lattice = circle
    with pytest.raises(ValueError):
        lp_norm(SpectralField.cosine(lattice, (1,)), 0.5)
    with pytest.raises(ValueError):
        lp_norm(SpectralField.character(lattice, (1,)), 1.0)


def test_vector_norm_of_sine_cosine_pair(circle):
    _, lattice = circle
    cos = SpectralField.cosine(lattice, (1,))
    sin = SpectralField.sine(lattice, (1,))
    # cos^2 + sin^2 = 1 поточечно
    for p in (1.0, 2.0, 4.0, math.inf):
        assert vector_lp_norm([cos, sin], p) == pytest.approx(1.0, rel=1e-12)


def test_quadrature_selection():
    low = quadrature_for(FrequencyLattice((4, 4)))
    assert isinstance(low, TensorGridRule) and low.exact
    high = quadrature_for(FrequencyLattice.uniform(5, 2))
    assert isinstance(high, RankOneLatticeRule)
    assert not high.exact


def test_lattice_rule_norms():
    lattice = FrequencyLattice.uniform(5, 2)
    rule = quadrature_for(lattice)
    cos = SpectralField.cosine(lattice, (1, 0, 0, 0, 0))
    # младшие гармоники интегрируются решёткой ранга 1 точно
    estimate = rule.integrate(rule.evaluate(cos), 2.0)
    assert estimate.value == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-10)
    assert lp_norm(cos, 1.0, rule) == pytest.approx(2.0 / math.pi, rel=1e-3)


def test_random_field_properties(torus3):
    w, lattice = torus3
    profile = DecayProfile.parse("polynomial:1.5")
    f = random_field(lattice, 11, profile)
    g = random_field(lattice, 11, profile)
    assert f.is_real()
    assert f.is_mean_zero()
    np.testing.assert_array_equal(f.coefficients, g.coefficients)
    assert np.all(np.abs(f.coefficients) <= profile.envelope(lattice) + 1e-15)
    assert random_field(lattice, 12, profile).max_difference(f) > 0.0

    with_mean = random_field(lattice, 11, profile, mean_zero=False)
    assert with_mean.mean.imag == 0.0
    spectral = random_field(lattice, 1, DecayProfile.parse("spectral:1"), weights=w)
    assert spectral.is_real()


@pytest.mark.parametrize("text", ["gaussian:1", "polynomial:0", "exponential"])
def test_invalid_profiles(text):
    with pytest.raises(ValueError):
        DecayProfile.parse(text)


def test_spectral_profile_needs_weights(torus3):
    _, lattice = torus3
    with pytest.raises(ValueError):
        random_field(lattice, 0, DecayProfile("spectral", 1.0))


def test_trial_dictionary(torus3):
    _, lattice = torus3
    trials = trial_dictionary(lattice, seed=5, random_per_profile=2, sign_patterns=2)
    names = [trial.name for trial in trials]
    assert len(names) == len(set(names))
    assert "cos(1,0,0)" in names and "sin(8,0,0)" in names
    for trial in trials:
        assert trial.field.is_real()
        assert trial.field.is_mean_zero()
        assert not trial.field.is_zero()


def test_field_csv(tmp_path, smooth_field):
    path = write_field_csv(smooth_field, str(tmp_path / "fields" / "f.csv"))
    restored = read_field_csv(path)
    assert restored.lattice == smooth_field.lattice
    assert restored.max_difference(smooth_field) < 1e-15
