# tests/conftest.py
import os
import sys

import pytest

# Добавляем корень проекта в путь для импортов
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.spectral import FrequencyLattice, WeightModel, random_field, DecayProfile  # noqa: E402


@pytest.fixture
def circle():
    """Окружность T^1 с a_1 = 1"""
    return WeightModel.explicit([1.0]), FrequencyLattice((6,))


@pytest.fixture
def torus3():
    """T^3 с весами (1, 2, 4) и полосами (8, 8, 8)"""
    return WeightModel.explicit([1.0, 2.0, 4.0]), FrequencyLattice((8, 8, 8))


@pytest.fixture
def matrix_model():
    """Недиагональная модель A = [[2, 1], [1, 2]]"""
    return WeightModel.from_matrix([[2.0, 1.0], [1.0, 2.0]]), FrequencyLattice((6, 6))


@pytest.fixture
def smooth_field(torus3):
    _, lattice = torus3
    return random_field(lattice, 3, DecayProfile("polynomial", 2.0))


@pytest.fixture
def env_output(tmp_path, monkeypatch):
    """Каталог вывода во временной директории"""
    monkeypatch.setenv("LAB_OUTPUT_DIR", str(tmp_path / "results"))
    return tmp_path / "results"
