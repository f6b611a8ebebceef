# src/spectral/dictionary.py
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .fields import SpectralField
from .lattice import FrequencyLattice
from .random_fields import DecayProfile, random_field

logger = logging.getLogger(__name__)

# Профили случайных полей словаря
DICTIONARY_PROFILES = ("flat", "polynomial:1.5", "exponential:0.5")
# Радиус низких мод для знаковых шаблонов
SIGN_PATTERN_RADIUS = 2


@dataclass(frozen=True)
class Trial:
    """Пробное поле словаря с идентификатором для свидетеля нарушения"""

    name: str
    field: SpectralField
    seed: int = -1


def _single_modes(lattice: FrequencyLattice) -> List[Tuple[int, ...]]:
    d = lattice.d
    modes = []
    for i in range(min(d, 3)):
        e = [0] * d
        e[i] = 1
        modes.append(tuple(e))
    e = [0] * d
    e[0] = min(2, lattice.bandwidths[0])
    modes.append(tuple(e))
    if d >= 2:
        e = [0] * d
        e[0], e[1] = 1, 1
        modes.append(tuple(e))
    e = [0] * d
    e[0] = lattice.bandwidths[0]
    modes.append(tuple(e))
    # порядок сохраняется, дубликаты удаляются
    return list(dict.fromkeys(modes))


def sign_pattern(lattice: FrequencyLattice, seed: int, radius: int = SIGN_PATTERN_RADIUS) -> SpectralField:
    """Коэффициенты +-1 на низких модах |n_i| <= radius, симметризованные и без среднего"""
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=lattice.shape)
    mask = np.all(np.abs(lattice.frequencies) <= radius, axis=0)
    raw = np.where(mask, signs, 0.0).astype(complex)
    field = SpectralField(lattice, (raw + np.conj(np.flip(raw))) / 2.0)
    return field.without_mean()


def trial_dictionary(lattice: FrequencyLattice, seed: int = 0, random_per_profile: int = 10,
                     sign_patterns: int = 5,
                     profiles: Sequence[str] = DICTIONARY_PROFILES) -> List[Trial]:
    """
    Словарь пробных полей для нижних оценок операторных норм

    Args:
        lattice: Решётка частот
        seed: Базовое зерно
        random_per_profile: Число случайных полей на профиль
        sign_patterns: Число знаковых шаблонов
        profiles: Профили случайных полей

    Returns:
        List[Trial]: Одиночные моды, случайные поля, знаковые шаблоны (все без среднего)
    """
    trials = []
    for mode in _single_modes(lattice):
        label = ",".join(str(k) for k in mode)
        trials.append(Trial(f"cos({label})", SpectralField.cosine(lattice, mode)))
        trials.append(Trial(f"sin({label})", SpectralField.sine(lattice, mode)))

    for p_index, text in enumerate(profiles):
        profile = DecayProfile.parse(text)
        for k in range(random_per_profile):
            s = seed + 1000 * (p_index + 1) + k
            trials.append(Trial(f"random[{profile.label}]#{s}", random_field(lattice, s, profile), s))

    for k in range(sign_patterns):
        s = seed + 9000 + k
        field = sign_pattern(lattice, s)
        if not field.is_zero():
            trials.append(Trial(f"signs#{s}", field, s))

    logger.debug(f"Словарь пробных полей: {len(trials)} элементов на решётке {lattice.bandwidths}")
    return trials
