# tests/test_poisson.py
import math

import numpy as np
import pytest

from src.poisson import (
    apply_generator,
    gradient_bound_check,
    index_pairs,
    lipschitz_regularity_report,
    regularity_family_check,
    second_derivative,
    sobolev_report,
    solve_poisson,
    tail_convergence,
    tail_operator,
)
from src.spectral import DecayProfile, SpectralField, WeightModel, random_field, trial_dictionary
from src.spectral import FrequencyLattice
from src.utils.numeric import log_grid, riesz_constant


def test_solve_then_apply_generator(torus3, smooth_field):
    w, _ = torus3
    u = solve_poisson(smooth_field, w)
    assert u.is_mean_zero()
    assert apply_generator(u, w).max_difference(smooth_field) < 1e-13
    # L u = -sum X_i^2 u
    assert tail_operator(u, 1, w).max_difference(-smooth_field) < 1e-13
    assert tail_operator(u, 4, w).is_zero()


def test_solve_on_matrix_model(matrix_model):
    w, lattice = matrix_model
    f = SpectralField.cosine(lattice, (1, 1))
    u = solve_poisson(f, w)
    # lambda(1, 1) = 6
    assert u.max_difference(f * (1.0 / 6.0)) < 1e-15
    assert (second_derivative(u, 1, 1, w) + second_derivative(u, 2, 2, w)).max_difference(-f) < 1e-14


def test_solve_requires_mean_zero(circle):
    w, lattice = circle
    with pytest.raises(ValueError):
        solve_poisson(SpectralField.constant(lattice, 1.0), w)


def test_tail_operator_range(torus3, smooth_field):
    w, _ = torus3
    with pytest.raises(IndexError):
        tail_operator(smooth_field, 0, w)
    with pytest.raises(IndexError):
        tail_operator(smooth_field, 5, w)


def test_index_pairs():
    assert index_pairs(3) == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
    sampled = index_pairs(8, seed=5)
    assert len(sampled) == 12
    assert sampled == index_pairs(8, seed=5)
    assert all(1 <= i <= j <= 8 for i, j in sampled)


def test_sobolev_report(torus3, smooth_field):
    w, _ = torus3
    u = solve_poisson(smooth_field, w)
    report = sobolev_report(u, 1.5, w)
    assert report.passed
    assert report.constants["riesz_constant"] == pytest.approx(riesz_constant(1.5))
    assert report.constants["identity_residual"] < 1e-12
    assert len(report.tables["sobolev"]) == 3 + 6
    with pytest.raises(ValueError):
        sobolev_report(u, 1.0, w)


def test_tail_convergence(torus3, smooth_field):
    w, _ = torus3
    u = solve_poisson(smooth_field, w)
    report = tail_convergence(u, 2.0, w)
    assert report.passed
    assert len(report.tail_curve) == w.dimension + 1
    assert report.tail_curve[-1] == 0.0
    assert len(report.bound_curve) == w.dimension
    assert report.tail_curve[0] == pytest.approx(smooth_field.l2_norm(), rel=1e-12)
    assert np.all(np.diff(report.tail_curve) <= 1e-12)
    payload = report.to_dict()
    assert payload["inputs"]["scale"] == "Lp"


def test_tail_convergence_in_lambda_scale(torus3, smooth_field):
    w, _ = torus3
    u = solve_poisson(smooth_field, w)
    report = tail_convergence(u, 2.0, w, scale="Lambda", theta=0.5)
    assert report.passed
    assert report.bound_curve == []
    with pytest.raises(ValueError):
        tail_convergence(u, 2.0, w, scale="Lambda")
    with pytest.raises(ValueError):
        tail_convergence(u, 2.0, w, scale="Hoelder", theta=0.5)


@pytest.mark.parametrize("p, first", [(2.0, 1.0 / math.sqrt(2.0)), (4.0, 0.375 ** 0.25)])
def test_tail_of_cylindric_field(torus3, p, first):
    w, lattice = torus3
    # u = cos(x_1): хвосты с m >= 2 не содержат X_1
    u = solve_poisson(SpectralField.cosine(lattice, (1, 0, 0)), w)
    report = tail_convergence(u, p, w)
    assert report.passed
    assert report.tail_curve[0] == pytest.approx(first, rel=1e-10)
    assert report.tail_curve[1:] == [0.0, 0.0, 0.0]
    assert report.constants["monotone"]
    assert report.tables["tail_curve"]["monotone"].all()


def test_tail_matches_coefficient_sums():
    w = WeightModel.power(0.5, 6)
    lattice = FrequencyLattice((3, 2, 2, 1, 1, 1))
    f = random_field(lattice, 7, DecayProfile("spectral", 1.5), weights=w)
    u = solve_poisson(f, w)
    report = tail_convergence(u, 2.0, w)
    assert report.passed

    # s_m^2 = sum_n (sum_{i >= m} a_i n_i^2)^2 |u_n|^2
    frequencies = lattice.frequencies.astype(float)
    weighted = w.weights.reshape((-1,) + (1,) * lattice.d) * frequencies ** 2
    tails = np.cumsum(weighted[::-1], axis=0)[::-1]
    power = np.abs(u.coefficients) ** 2
    expected = [math.sqrt(float(np.sum(tails[m] ** 2 * power))) for m in range(lattice.d)]
    np.testing.assert_allclose(report.tail_curve[:-1], expected, rtol=1e-10)
    assert report.tail_curve[0] == pytest.approx(f.l2_norm(), rel=1e-10)


def test_tail_monotonicity_is_reported_for_every_p(torus3, smooth_field):
    w, _ = torus3
    u = solve_poisson(smooth_field, w)
    report = tail_convergence(u, 4.0, w)
    table = report.tables["tail_curve"]
    assert list(table.columns) == ["m", "tail", "bound", "monotone"]
    assert report.constants["monotone"] == bool(table["monotone"].all())
    # при p != 2 монотонность не входит в запасы
    slacks = [bound - tail for bound, tail in zip(report.bound_curve, report.tail_curve)]
    assert report.worst_slack == pytest.approx(min(slacks))


def test_lipschitz_regularity_interior(torus3, smooth_field):
    w, _ = torus3
    report = lipschitz_regularity_report(smooth_field, 0.5, 2.0, w)
    assert report.passed
    table = report.tables["regularity"]
    assert list(table["quantity"][:2]) == ["f", "u"]
    # Lambda_{theta+2,n+1}(u) совпадает с Lambda_{theta,n}(f)
    assert table.loc[1, "value"] == pytest.approx(table.loc[0, "value"], rel=1e-10)
    assert report.constants["riesz_bound"] == pytest.approx(2.0 * report.constants["Lambda_f"])


def test_lipschitz_regularity_with_distance_scale(torus3, smooth_field):
    w, _ = torus3
    report = lipschitz_regularity_report(smooth_field, 0.9, 2.0, w, lam=0.1, pairs=[(1, 2)])
    assert report.constants["beta"] == pytest.approx(0.61)
    assert set(report.tables["distance_regularity"]["quantity"]) == {"u", "X1u", "X2u", "X1X2u"}


def test_lipschitz_regularity_endpoint():
    w = WeightModel.explicit([1.0])
    lattice = FrequencyLattice((6,))
    f = random_field(lattice, 2, DecayProfile("polynomial", 2.0))
    report = lipschitz_regularity_report(f, 0.5, math.inf, w, lam=0.1)
    assert report.passed
    assert math.isfinite(report.constants["max_ratio_to_f"])
    with pytest.raises(ValueError):
        lipschitz_regularity_report(f, 0.5, math.inf, w)
    with pytest.raises(ValueError):
        lipschitz_regularity_report(f, 0.5, math.inf, w, lam=0.3)


def test_regularity_family_check(torus3):
    w, lattice = torus3
    fields = [random_field(lattice, seed, DecayProfile("polynomial", 2.0)) for seed in range(3)]
    report = regularity_family_check(fields, 0.5, 2.0, w, pairs=[(1, 1), (2, 3)])
    assert report.passed
    assert report.constants["max_ratio"] <= 1.0 + 1e-9
    with pytest.raises(ValueError):
        regularity_family_check(fields, 0.5, math.inf, w)


def test_gradient_bound_check():
    w = WeightModel.explicit([1.0, 4.0])
    lattice = FrequencyLattice((4, 3))
    trials = trial_dictionary(lattice, seed=0, random_per_profile=1, sign_patterns=1)[:6]
    report = gradient_bound_check(w, trials, log_grid(1e-2, 1.0, 6), [2.0, math.inf])
    assert report.constants["K_hat"] > 0
    assert math.isfinite(report.constants["C_hat"])
    # sqrt(t) ||Gamma(H_t f)^{1/2}||_2 <= (2e)^{-1/2} ||f||_2
    assert report.constants["K_hat_by_p"][2.0] <= 1.0 / (math.sqrt(2.0 * math.e) * 2.0 * math.sqrt(2.0)) + 1e-12
    with pytest.raises(ValueError):
        gradient_bound_check(w, trials, [1.0], [0.5])
