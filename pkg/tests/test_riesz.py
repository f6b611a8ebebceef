# tests/test_riesz.py
import math

import numpy as np
import pytest

from src.riesz import (
    RieszSymbol,
    RieszVector,
    estimate_operator_ratio,
    riesz_first,
    riesz_second,
    riesz_tail,
    riesz_vector_norm,
)
from src.spectral import FrequencyLattice, SpectralField, WeightModel, lp_norm, trial_dictionary
from src.utils.numeric import p_star, riesz_constant


@pytest.mark.parametrize("a", [1.0, 4.0, 9.0])
def test_riesz_of_cosine_is_minus_sine(a):
    lattice = FrequencyLattice((4,))
    w = WeightModel.explicit([a])
    cos = SpectralField.cosine(lattice, (1,))
    sin = SpectralField.sine(lattice, (1,))
    assert riesz_first(cos, 1, w).max_difference(-sin) < 1e-14
    assert riesz_first(sin, 1, w).max_difference(cos) < 1e-14


def test_sum_of_squares_is_minus_identity(torus3, smooth_field):
    w, _ = torus3
    total = SpectralField.zeros(smooth_field.lattice)
    for i in range(1, w.dimension + 1):
        total = total + riesz_second(smooth_field, i, i, w)
    assert total.max_difference(-smooth_field) < 1e-12


def test_sum_of_squares_matrix_model(matrix_model):
    w, lattice = matrix_model
    f = SpectralField.cosine(lattice, (1, 2)) + SpectralField.sine(lattice, (3, -1))
    total = riesz_second(f, 1, 1, w) + riesz_second(f, 2, 2, w)
    assert total.max_difference(-f) < 1e-12


def test_riesz_vector_is_l2_isometry(torus3, smooth_field, matrix_model):
    w, _ = torus3
    assert riesz_vector_norm(smooth_field, 2.0, w) == pytest.approx(smooth_field.l2_norm(), rel=1e-12)
    # среднее уничтожается символом
    with_mean = smooth_field + SpectralField.constant(smooth_field.lattice, 5.0)
    assert riesz_vector_norm(with_mean, 2.0, w) == pytest.approx(smooth_field.l2_norm(), rel=1e-12)
    w, lattice = matrix_model
    f = SpectralField.cosine(lattice, (2, 1))
    assert riesz_vector_norm(f, 2.0, w) == pytest.approx(f.l2_norm(), rel=1e-12)


def test_riesz_tail(torus3, smooth_field):
    w, _ = torus3
    full = riesz_vector_norm(smooth_field, 3.0, w)
    assert riesz_tail(smooth_field, 1, 3, 3.0, w) == pytest.approx(full, rel=1e-12)
    single = lp_norm(riesz_first(smooth_field, 3, w), 3.0)
    assert riesz_tail(smooth_field, 3, 3, 3.0, w) == pytest.approx(single, rel=1e-12)
    tails = [riesz_tail(smooth_field, m, 3, 2.0, w) for m in (1, 2, 3)]
    assert tails[0] >= tails[1] >= tails[2]


def test_symbol_validation(torus3):
    w, _ = torus3
    assert RieszSymbol(2, (1, 3), w).name == "R1R3"
    assert RieszVector(w).name == "RG"
    assert RieszVector(w, 2, 3).name == "R[2..3]"
    with pytest.raises(IndexError):
        RieszSymbol(1, (4,), w)
    with pytest.raises(ValueError):
        RieszSymbol(2, (1,), w)
    with pytest.raises(ValueError):
        RieszVector(w, 3, 2)


def test_riesz_constant():
    assert p_star(2.0) == 2.0
    assert p_star(1.25) == pytest.approx(5.0)
    assert p_star(4.0) == 4.0
    assert riesz_constant(2.0) == 2.0
    assert math.isinf(p_star(1.0))
    with pytest.raises(ValueError):
        p_star(0.5)


@pytest.fixture
def riesz_trials():
    lattice = FrequencyLattice((6, 3))
    return trial_dictionary(lattice, seed=2, random_per_profile=2, sign_patterns=2)


@pytest.mark.parametrize("p", [1.25, 2.0, 4.0])
def test_operator_ratio_below_bound(riesz_trials, p):
    w = WeightModel.explicit([1.0, 4.0])
    for op in (RieszSymbol(1, (1,), w), RieszVector(w), RieszSymbol(2, (1, 2), w)):
        report = estimate_operator_ratio(op, p, riesz_trials)
        assert report.passed
        assert 0 < report.constants["best_ratio"] <= riesz_constant(p)


def test_second_order_ratio_at_two_is_one(riesz_trials):
    w = WeightModel.explicit([1.0, 4.0])
    report = estimate_operator_ratio(RieszSymbol(2, (1, 1), w), 2.0, riesz_trials)
    # на cos(e_1) символ R_1 R_1 равен -1, а |символ| <= 1
    assert report.constants["best_ratio"] == pytest.approx(1.0, abs=1e-10)
    table = report.tables["riesz_ratios"]
    assert table.loc[0, "op"] == "R1R1"
    assert np.isclose(table.loc[0, "slack"], riesz_constant(2.0) - 1.0)


def test_operator_ratio_requires_interior_p(riesz_trials):
    w = WeightModel.explicit([1.0, 4.0])
    with pytest.raises(ValueError):
        estimate_operator_ratio(RieszVector(w), 1.0, riesz_trials)
