# tests/test_semigroup.py
import math
import warnings

import numpy as np
import pytest

from src.semigroup import (
    check_analyticity,
    check_contraction,
    check_fractional_bound,
    check_kernel_value,
    check_L1_Linf_differentiability,
    check_ultracontractivity,
    classify_CK,
    finite_difference_order,
    fractional_heat,
    fractional_power,
    heat_apply,
    heat_time_derivative,
    kernel_at_identity,
    kernel_density,
    kernel_diagnostics,
    log_theta1d,
    m0,
    matrix_kernel_sum,
    poisson_apply,
    theta1d,
)
from src.semigroup.heat import smallest_eigenvalue
from src.spectral import DecayProfile, FrequencyLattice, SpectralField, WeightModel, random_field, trial_dictionary
from src.utils.numeric import log_grid


@pytest.fixture
def small_trials():
    lattice = FrequencyLattice((6, 4))
    return lattice, trial_dictionary(lattice, seed=1, random_per_profile=2, sign_patterns=1)


def test_theta_value():
    assert theta1d(0.0, 1.0) == pytest.approx(1.7726372, abs=1e-7)
    assert theta1d(0.0, 1.0, "spectral") == pytest.approx(theta1d(0.0, 1.0, "images"), rel=1e-12)


@pytest.mark.parametrize("s", [1.0, math.pi, 4.0, 10.0])
def test_theta_representations_agree(s):
    x = np.linspace(-math.pi, math.pi, 33)
    np.testing.assert_allclose(log_theta1d(x, s, "spectral"), log_theta1d(x, s, "images"), atol=1e-12)


def test_theta_is_positive_and_periodic():
    x = np.linspace(0.0, 2.0 * math.pi, 101)
    values = theta1d(x, 0.05)
    assert np.all(values > 0)
    assert np.all(np.isfinite(log_theta1d(x, 1e-4)))
    np.testing.assert_allclose(log_theta1d(x + 2.0 * math.pi, 0.3), log_theta1d(x, 0.3), atol=1e-12)
    with pytest.raises(ValueError):
        log_theta1d(0.0, 0.0)
    with pytest.raises(ValueError):
        log_theta1d(0.0, 1.0, "fourier")


@pytest.mark.parametrize("s", [1e306, 1e308])
def test_theta_at_huge_s_is_silent(s):
    # theta(x, s) -> 1 без предупреждений о переполнении s k^2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert log_theta1d(0.5, s) == 0.0
        assert theta1d(np.array([0.0, math.pi]), s).tolist() == [1.0, 1.0]


def _theta_series(s: float) -> float:
    return math.fsum(math.exp(-s * k * k) for k in range(-40, 41))


def test_kernel_value_on_two_torus():
    w = WeightModel.explicit([1.0, 4.0])
    expected = _theta_series(1.0) * _theta_series(4.0)
    assert kernel_density([0.0, 0.0], 1.0, w) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(1.8375741, abs=1e-5)
    report = check_kernel_value(w, 1.0)
    assert report.passed
    assert report.constants["mu_t_e"] == pytest.approx(expected, rel=1e-12)
    assert report.constants["difference"] < 1e-10


def test_kernel_diagnostics_monotone():
    diagnostics = kernel_diagnostics(WeightModel.power(0.5, 2), log_grid(1e-4, 1.0, 12))
    assert diagnostics.is_decreasing()
    assert np.all(diagnostics.effective_dimension[:-1] >= diagnostics.effective_dimension[1:])
    table = diagnostics.table([0.5])
    assert list(table.columns) == ["t", "log_mu_t_e", "M0", "effective_dimension", "sup_t_lambda_0.5"]


def test_matrix_kernel_matches_product():
    diagonal = WeightModel.explicit([1.0, 2.0])
    as_matrix = WeightModel.from_matrix(diagonal.gram)
    x = np.array([0.3, -1.2])
    assert matrix_kernel_sum(x, 0.5, as_matrix, 24) == pytest.approx(kernel_density(x, 0.5, diagonal), rel=1e-12)


def test_matrix_kernel_tail_control():
    w = WeightModel.from_matrix([[2.0, 1.0], [1.0, 2.0]])
    with pytest.raises(ValueError):
        matrix_kernel_sum(np.zeros(2), 1e-3, w, 4)


def test_kernel_at_identity_is_adaptive():
    w = WeightModel.power(0.5, 3)
    kernel = kernel_at_identity(1.0, w)
    assert kernel.log_mu == pytest.approx(0.60869, abs=1e-4)
    assert not kernel.tail_significant
    # произведение не обрезается размерностью усечённого тора
    assert kernel_at_identity(1.0, WeightModel.power(0.5, 1)).log_mu == pytest.approx(kernel.log_mu, rel=1e-14)
    small_t = kernel_at_identity(1e-4, w)
    assert small_t.effective_dimension > 3
    assert m0(1.0, w) == kernel.log_mu


def test_kernel_at_identity_errors():
    with pytest.raises(ValueError):
        kernel_at_identity(0.0, WeightModel.power(0.5, 2))
    with pytest.raises(ValueError):
        kernel_at_identity(1.0, WeightModel.from_matrix([[2.0, 1.0], [1.0, 2.0]]))
    assert kernel_at_identity(1e-6, WeightModel.explicit([1.0])).tail_significant


def test_semigroup_law(torus3, smooth_field):
    w, _ = torus3
    once = heat_apply(heat_apply(smooth_field, 0.1, w), 0.25, w)
    assert once.max_difference(heat_apply(smooth_field, 0.35, w)) < 1e-14
    assert heat_apply(smooth_field, 0.0, w) is smooth_field
    with pytest.raises(ValueError):
        heat_apply(smooth_field, -1.0, w)


def test_heat_preserves_mass(torus3):
    w, lattice = torus3
    f = random_field(lattice, 4, DecayProfile("exponential", 0.5), mean_zero=False)
    assert heat_apply(f, 0.7, w).mean == pytest.approx(f.mean, abs=1e-15)


def test_time_derivative_is_generator(torus3, smooth_field):
    w, _ = torus3
    t = 0.2
    expected = -fractional_power(heat_apply(smooth_field, t, w), 1.0, w)
    assert heat_time_derivative(smooth_field, t, 1, w).max_difference(expected) < 1e-12
    second = fractional_power(fractional_power(heat_apply(smooth_field, t, w), 1.0, w), 1.0, w)
    assert heat_time_derivative(smooth_field, t, 2, w).max_difference(second) < 1e-12
    assert fractional_heat(smooth_field, t, 1.0, w).max_difference(-heat_time_derivative(smooth_field, t, 1, w)) < 1e-12
    with pytest.raises(ValueError):
        heat_time_derivative(smooth_field, t, 0, w)


def test_poisson_semigroup_on_character():
    w = WeightModel.explicit([4.0])
    lattice = FrequencyLattice((3,))
    cos = SpectralField.cosine(lattice, (1,))
    assert poisson_apply(cos, 0.5, w).max_difference(cos * math.exp(-0.5 * 2.0)) < 1e-15


def test_negative_power_requires_mean_zero(circle):
    w, lattice = circle
    with pytest.raises(ValueError):
        fractional_power(SpectralField.constant(lattice, 1.0), -0.5, w)
    assert smallest_eigenvalue(lattice, w) == 1.0


def test_finite_difference_order(torus3):
    w, lattice = torus3
    f = random_field(lattice, 2, DecayProfile("polynomial", 1.5))
    assert finite_difference_order(f, 0.5, w) >= 1.9
    with pytest.raises(ValueError):
        finite_difference_order(f, 1e-3, w)


def test_analyticity(small_trials):
    lattice, trials = small_trials
    w = WeightModel.explicit([1.0, 4.0])
    report = check_analyticity(w, [1.5, 2.0, 4.0], trials, log_grid(1e-3, 10.0, 8))
    assert report.passed
    assert report.worst_slack > 0
    assert set(report.tables["analyticity"]["n"]) == {1, 2}
    with pytest.raises(ValueError):
        check_analyticity(w, 1.0, trials, [1.0])


def test_contraction_and_ultracontractivity(small_trials):
    lattice, trials = small_trials
    w = WeightModel.explicit([1.0, 4.0])
    t_grid = log_grid(1e-2, 1.0, 4)
    assert check_contraction(w, [1.0, 2.0, 4.0, math.inf], trials, t_grid).passed
    assert check_ultracontractivity(w, [1.0, 2.0], trials, t_grid).passed
    with pytest.raises(ValueError):
        check_ultracontractivity(w, [math.inf], trials, t_grid)


def test_differentiability(small_trials):
    lattice, trials = small_trials
    w = WeightModel.explicit([1.0, 4.0])
    report = check_L1_Linf_differentiability(w, lattice, trials, [0.5, 1.0, 2.0])
    assert report.passed
    table = report.tables["l1_linf_differentiability"]
    assert len(table) == 6
    assert np.all(table["bound"] >= table["lower_p1"])


def test_fractional_bound(small_trials):
    lattice, trials = small_trials
    w = WeightModel.explicit([1.0, 4.0])
    assert check_fractional_bound(w, 2.0, 0.5, trials).passed
    with pytest.raises(ValueError):
        check_fractional_bound(w, 1.0, 0.5, trials)


def test_classify_power_weights():
    result = classify_CK(WeightModel.power(0.5, 3), lambdas=[0.3, 0.9])
    assert not result.tail_dominated
    assert result.fitted_exponent == pytest.approx(0.5, abs=0.1)
    assert result.stabilized[0.9]
    assert not result.stabilized[0.3]
    assert result.verdict(0.3) == "not stabilized"
    report = result.to_report()
    assert list(report.tables["ck_classification"]["lambda"]) == [0.3, 0.9]


def test_classify_flags_finite_weight_list():
    result = classify_CK(WeightModel.explicit([1.0, 2.0]), lambdas=[0.5], t_grid=log_grid(1e-6, 1.0, 20))
    assert result.tail_dominated
    assert result.verdict(0.5) == "tail-dominated / not classifiable"
    with pytest.raises(ValueError):
        classify_CK(WeightModel.power(0.5, 2), t_grid=[0.5, 2.0])
