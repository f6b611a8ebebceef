# tests/test_stochastic.py
import math

import numpy as np
import pandas as pd
import pytest
from scipy import integrate

from src.spectral import FrequencyLattice, SpectralField, WeightModel
from src.stochastic import (
    PairingCase,
    PathConfig,
    block_generators,
    coordinate_variance_check,
    exit_time_check,
    hitting_law_check,
    killed_resolvent,
    mc_riesz_pairing,
    mc_second_order_pairing,
    pairing_panel,
    poisson_kernel,
    quadratic_variation_check,
    simulate_heights,
    simulate_paths,
    stderr_scaling_check,
    subordination_check,
    terminal_uniformity_check,
    wrapped_marginal_probabilities,
)

FAST = PathConfig(dt=1e-2, n_paths=2_000, max_steps=2_000, seed=1, block_size=512)


@pytest.fixture
def modes():
    """Окружность a = 1: cos x, sin x"""
    lattice = FrequencyLattice((2,))
    return (WeightModel.explicit([1.0]), SpectralField.cosine(lattice, (1,)),
            SpectralField.sine(lattice, (1,)))


@pytest.mark.parametrize("changes", [
    {"dt": 0.0},
    {"y0": -1.0},
    {"n_paths": 1},
    {"max_steps": 0},
    {"stop_level": 3.0},
    {"stop_level": -0.1},
])
def test_path_config_validation(changes):
    with pytest.raises(ValueError):
        PathConfig().with_updates(**changes)


def test_path_config_defaults():
    cfg = PathConfig()
    assert cfg.horizon == pytest.approx(20.0)
    assert cfg.with_updates(seed=5).seed == 5
    assert cfg.with_updates(seed=5).n_paths == cfg.n_paths


def test_block_generators_are_deterministic():
    cfg = PathConfig(n_paths=1_000, block_size=300, seed=9)
    blocks = list(block_generators(cfg))
    assert [size for _, size, _ in blocks] == [300, 300, 300, 100]
    assert [start for start, _, _ in blocks] == [0, 300, 600, 900]
    first = [rng.random() for _, _, rng in block_generators(cfg)]
    second = [rng.random() for _, _, rng in block_generators(cfg)]
    assert first == second
    assert len(set(first)) == len(first)


def test_killed_resolvent():
    kappa, c = np.array([1.0]), np.array([2.0])
    assert killed_resolvent(np.array([0.0]), kappa, c)[0] == pytest.approx(0.0, abs=1e-15)
    expected = (math.exp(-1.0) - math.exp(-2.0)) / 3.0
    assert killed_resolvent(np.array([1.0]), kappa, c)[0] == pytest.approx(expected, rel=1e-12)
    # c = sqrt(kappa): u(y) = y e^{-c y} / (2c)
    assert killed_resolvent(np.array([2.0]), kappa, np.array([1.0]))[0] == pytest.approx(math.exp(-2.0), rel=1e-12)
    # непрерывность при c -> sqrt(kappa)
    near = killed_resolvent(np.array([2.0]), kappa, np.array([1.0 + 1e-7]))[0]
    assert near == pytest.approx(math.exp(-2.0), rel=1e-6)


def test_killed_resolvent_solves_equation():
    y = np.linspace(0.5, 3.0, 6)
    kappa, c = 2.0, 3.0
    step = 1e-3
    u = lambda s: killed_resolvent(s[:, None], np.array([kappa]), np.array([c]))[:, 0]
    second = (u(y + step) - 2.0 * u(y) + u(y - step)) / step ** 2
    np.testing.assert_allclose(kappa * u(y) - second, np.exp(-c * y), rtol=1e-5)


def test_poisson_kernel():
    assert poisson_kernel(np.array([2.0]), np.array([4.0]), np.array([0.0]))[0] == pytest.approx(math.exp(-4.0))


def test_wrapped_marginal_probabilities():
    probs = wrapped_marginal_probabilities(0.5, 1.0, 8)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    r = math.exp(-0.5)
    density = lambda x: (1.0 - r * r) / (2.0 * math.pi * (1.0 - 2.0 * r * math.cos(x) + r * r))
    edges = np.linspace(0.0, 2.0 * math.pi, 9)
    exact = [integrate.quad(density, lo, hi)[0] for lo, hi in zip(edges[:-1], edges[1:])]
    np.testing.assert_allclose(probs, exact, atol=1e-10)
    # закон при B_0 = 0 сосредоточен у нуля
    assert probs[0] == probs.max()
    np.testing.assert_allclose(wrapped_marginal_probabilities(40.0, 1.0, 8), np.full(8, 1.0 / 8.0))


def test_simulate_heights():
    batch = simulate_heights(FAST)
    assert batch.n_paths == FAST.n_paths
    assert np.all(batch.times <= FAST.horizon + 1e-12)
    assert np.all(batch.heights[batch.stopped] == 0.0)
    assert np.all(batch.heights[~batch.stopped] > 0.0)
    assert np.array_equal(batch.hit, batch.stopped)
    with pytest.raises(ValueError):
        simulate_heights(FAST, upper=2.0)


def test_simulate_paths_is_seeded(modes):
    w, cos, _ = modes
    integrand = {"m": lambda y, x: np.cos(x[:, 0]) * np.exp(-y)}
    cfg = FAST.with_updates(n_paths=300, stop_level=0.2)
    first = simulate_paths(cfg, w, integrand)
    second = simulate_paths(cfg, w, integrand)
    np.testing.assert_array_equal(first.integrals["m"], second.integrals["m"])
    np.testing.assert_array_equal(first.positions, second.positions)
    assert np.all((first.positions >= 0) & (first.positions < 2.0 * math.pi))
    frame = first.to_frame()
    assert list(frame.columns) == ["x_1", "height", "time", "stopped", "m"]
    with pytest.raises(ValueError):
        simulate_paths(cfg, w, integrand, drivers={"m": 2})


def test_pairing_reference_and_limit(modes, tmp_path):
    w, cos, sin = modes
    output = str(tmp_path / "paths.tsv")
    result = mc_riesz_pairing(sin, cos, 1, FAST, w, output=output)
    assert result.limit == pytest.approx(0.25, rel=1e-14)
    assert result.reference == pytest.approx(0.25 * -math.expm1(-6.0), rel=1e-12)
    assert result.reference == pytest.approx(0.249380, abs=1e-6)
    assert result.limit_gap <= 0.003
    assert result.stderr > 0
    assert result.n_paths == FAST.n_paths
    frame = pd.read_csv(output, sep="\t")
    assert "estimator" in frame.columns and len(frame) == FAST.n_paths

    again = mc_riesz_pairing(sin, cos, 1, FAST, w)
    assert again.estimate == result.estimate
    assert mc_riesz_pairing(sin, cos, 1, FAST.with_updates(seed=2), w).estimate != result.estimate


def test_pairing_by_parity_vanishes(modes):
    w, cos, _ = modes
    result = mc_riesz_pairing(cos, cos, 1, FAST.with_updates(n_paths=500), w)
    assert result.reference == pytest.approx(0.0, abs=1e-15)
    assert result.limit == pytest.approx(0.0, abs=1e-15)


def test_pairing_with_vanishing_integrand():
    w = WeightModel.explicit([1.0, 2.0])
    lattice = FrequencyLattice((2, 2))
    f = SpectralField.cosine(lattice, (1, 0))
    h = SpectralField.sine(lattice, (1, 0))
    result = mc_riesz_pairing(h, f, 2, FAST.with_updates(n_paths=200), w)
    assert result.estimate == 0.0 and result.stderr == 0.0
    assert result.reference == 0.0
    assert result.agrees()
    assert result.to_report().passed


def test_pairing_validation(modes):
    w, cos, sin = modes
    with pytest.raises(ValueError):
        mc_riesz_pairing(sin, cos + SpectralField.constant(cos.lattice, 1.0), 1, FAST, w)
    with pytest.raises(IndexError):
        mc_riesz_pairing(sin, cos, 2, FAST, w)
    with pytest.raises(ValueError):
        mc_riesz_pairing(sin, SpectralField.cosine(FrequencyLattice((3,)), (1,)), 1, FAST, w)
    with pytest.raises(ValueError):
        mc_riesz_pairing(SpectralField.character(sin.lattice, (1,)), cos, 1, FAST, w)


def test_second_order_pairing_limit():
    w = WeightModel.explicit([1.0, 4.0])
    lattice = FrequencyLattice((2, 2))
    f = SpectralField.cosine(lattice, (1, 1))
    # R_1 R_1 cos(x1 + x2) = -(1/5) cos(x1 + x2)
    result = mc_second_order_pairing(f, f, 1, 1, FAST.with_updates(n_paths=300), w)
    assert result.limit == pytest.approx(-0.5 * -0.2 * 0.5, rel=1e-12)
    assert result.reference == pytest.approx(result.limit * -math.expm1(-6.0 * math.sqrt(5.0)), rel=1e-10)


def test_coordinate_variance_argument_check(modes):
    w, _, _ = modes
    with pytest.raises(ValueError):
        coordinate_variance_check(FAST, w, 0.0)


def test_pairing_panel_requires_cases(modes):
    w, _, _ = modes
    with pytest.raises(ValueError):
        pairing_panel([], FAST, w)


@pytest.mark.slow
def test_exit_time():
    report = exit_time_check(PathConfig(dt=1e-3, y0=1.0, n_paths=20_000, max_steps=20_000, seed=3))
    assert report.passed
    assert report.constants["expected"] == 0.5


@pytest.mark.slow
def test_hitting_law():
    report = hitting_law_check(PathConfig(dt=1e-3, y0=1.0, n_paths=20_000, max_steps=10_000, seed=4))
    assert report.passed


@pytest.mark.slow
def test_terminal_law():
    w = WeightModel.explicit([1.0, 4.0])
    report = terminal_uniformity_check(PathConfig(dt=1e-3, y0=0.5, n_paths=20_000, max_steps=5_000, seed=5), w)
    assert report.passed
    assert report.constants["uniform_deviation"] > 0.01


@pytest.mark.slow
def test_coordinate_variance():
    w = WeightModel.from_matrix([[2.0, 1.0], [1.0, 2.0]])
    report = coordinate_variance_check(PathConfig(dt=1e-2, n_paths=50_000, seed=6), w, 0.5)
    assert report.passed
    table = report.tables["coordinate_variance"]
    np.testing.assert_allclose(table["expected"], [2.0, 1.0, 2.0])


@pytest.mark.slow
def test_pairing_agrees_with_reference(modes):
    w, cos, sin = modes
    cfg = PathConfig(dt=5e-3, n_paths=20_000, max_steps=4_000, seed=7)
    result = mc_riesz_pairing(sin, cos, 1, cfg, w)
    assert result.agrees()


@pytest.mark.slow
def test_pairing_panel_and_scaling(modes):
    w, cos, sin = modes
    cases = [PairingCase("sin-cos", sin, cos, 1), PairingCase("cos-cos", cos, cos, 1)]
    cfg = PathConfig(dt=1e-2, n_paths=4_000, max_steps=2_000, seed=11)
    panel = pairing_panel(cases, cfg, w, size=10, required=0.8)
    assert panel.passed
    assert list(panel.tables["pairing_panel"]["seed"]) == list(range(11, 21))
    scaling = stderr_scaling_check(cases[0], cfg, w, factor=4)
    assert scaling.passed


@pytest.mark.slow
def test_subordination(modes):
    w, cos, _ = modes
    report = subordination_check(cos, 1.0, PathConfig(dt=1e-3, n_paths=20_000, max_steps=5_000, seed=8), w)
    assert report.passed
    assert report.constants["reference"] == pytest.approx(math.exp(-1.0), rel=1e-12)


@pytest.mark.slow
def test_quadratic_variation(modes):
    w, cos, _ = modes
    report = quadratic_variation_check(cos, PathConfig(dt=2e-3, n_paths=5_000, max_steps=5_000, seed=9), w)
    assert report.passed
    assert report.constants["reference"] == pytest.approx(0.5 * -math.expm1(-6.0), rel=1e-12)
