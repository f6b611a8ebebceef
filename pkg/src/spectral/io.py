# src/spectral/io.py
import logging
import os
from typing import Optional

import numpy as np
import pandas as pd

from .fields import SpectralField
from .lattice import FrequencyLattice

logger = logging.getLogger(__name__)


def field_to_frame(field: SpectralField) -> pd.DataFrame:
    """
    Таблица коэффициентов: столбцы n_1..n_d, re, im (все точки решётки)

    Args:
        field: Спектральное поле

    Returns:
        pd.DataFrame: Таблица в порядке обхода решётки
    """
    freqs = field.lattice.frequencies.reshape(field.d, -1)
    data = {f"n_{i + 1}": freqs[i] for i in range(field.d)}
    c = field.coefficients.ravel()
    data["re"] = c.real
    data["im"] = c.imag
    return pd.DataFrame(data)


def field_from_frame(frame: pd.DataFrame, lattice: Optional[FrequencyLattice] = None) -> SpectralField:
    """Восстановление поля из таблицы коэффициентов; решётка по умолчанию - по max |n_i|"""
    columns = [c for c in frame.columns if c.startswith("n_")]
    if not columns or "re" not in frame or "im" not in frame:
        raise ValueError(f"Таблица коэффициентов должна содержать n_1..n_d, re, im; получено: {list(frame.columns)}")
    columns.sort(key=lambda c: int(c[2:]))
    freqs = frame[columns].to_numpy(dtype=int)
    if lattice is None:
        lattice = FrequencyLattice(tuple(int(b) for b in np.abs(freqs).max(axis=0)))
    c = np.zeros(lattice.shape, dtype=complex)
    values = frame["re"].to_numpy(dtype=float) + 1j * frame["im"].to_numpy(dtype=float)
    for n, value in zip(freqs, values):
        c[lattice.index_of(n)] += value
    return SpectralField(lattice, c)


def write_field_csv(field: SpectralField, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    field_to_frame(field).to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Коэффициенты поля ({field.lattice.size} строк) сохранены в {path}")
    return path


def read_field_csv(path: str, lattice: Optional[FrequencyLattice] = None) -> SpectralField:
    return field_from_frame(pd.read_csv(path), lattice)
