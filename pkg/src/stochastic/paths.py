# src/stochastic/paths.py
"""
Моделирование броуновского движения B_t на T^d с генератором -L = sum X_i^2
вместе с фоновым движением beta_t на полуоси с генератором d^2/dy^2, убиваемым в 0.

Нормировка без множителя 1/2: приращения координат имеют дисперсию 2 a_i dt
(в общем случае ковариацию 2 A dt), приращения beta - дисперсию 2 dt.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..geometry.points import TWO_PI
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 2 ** 15
# Доля усечённых путей, выше которой выводится предупреждение
DEFAULT_TRUNCATION_WARNING = 0.5
# Уровень остановки для оценок с точным условным дополнением
DEFAULT_COMPLETION_LEVEL = 0.2

# g(beta, B) -> значения подынтегрального выражения, формы (P,) при beta (P,), B (P, d)
Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PathConfig:
    """
    Параметры моделирования путей

    dt - шаг; y0 - начальная высота фонового движения; n_paths - число путей;
    seed - зерно SeedSequence; max_steps - предел числа шагов (горизонт T = dt * max_steps);
    block_size - размер блока путей с собственным потоком случайных чисел;
    stop_level - уровень остановки beta (0 - попадание в 0 с поправкой броуновского моста);
    truncation_warning - доля усечённых путей для предупреждения.
    """

    dt: float = 1e-3
    y0: float = 3.0
    n_paths: int = 100_000
    seed: int = 0
    max_steps: int = 20_000
    block_size: int = DEFAULT_BLOCK_SIZE
    stop_level: float = 0.0
    truncation_warning: float = DEFAULT_TRUNCATION_WARNING

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"Шаг dt должен быть > 0, получено: {self.dt}")
        if not self.y0 > 0:
            raise ValueError(f"Начальная высота y0 должна быть > 0, получено: {self.y0}")
        if self.n_paths < 2:
            raise ValueError(f"Требуется хотя бы 2 пути, получено: {self.n_paths}")
        if self.max_steps < 1 or self.block_size < 1:
            raise ValueError(f"Некорректные max_steps={self.max_steps} или block_size={self.block_size}")
        if not 0 <= self.stop_level < self.y0:
            raise ValueError(f"Уровень остановки должен лежать в [0, y0), получено: {self.stop_level}")

    @property
    def horizon(self) -> float:
        return self.dt * self.max_steps

    def with_updates(self, **changes) -> "PathConfig":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return PathConfig(**values)


def block_generators(cfg: PathConfig) -> Iterator[Tuple[int, int, np.random.Generator]]:
    """Блоки путей (начало, размер, генератор) из SeedSequence(seed).spawn в фиксированном порядке"""
    n_blocks = math.ceil(cfg.n_paths / cfg.block_size)
    children = np.random.SeedSequence(cfg.seed).spawn(n_blocks)
    for k, child in enumerate(children):
        start = k * cfg.block_size
        yield start, min(cfg.block_size, cfg.n_paths - start), np.random.default_rng(child)


@dataclass
class StepView:
    """Шаг живых путей: индексы, состояние до шага, приращения, состояние после шага и признак остановки"""

    index: np.ndarray
    height: np.ndarray
    position: np.ndarray
    d_height: np.ndarray
    noise: np.ndarray
    new_height: np.ndarray
    new_position: np.ndarray
    stopped: np.ndarray
    to_zero: np.ndarray
    time: float
    dt: float

    @property
    def effective_d_height(self) -> np.ndarray:
        """Приращение beta с учётом остановки: для попавших в 0 путей оно доводит beta до 0"""
        return np.where(self.to_zero, -self.height, self.d_height)


class PathWalker:
    """
    Пошаговое моделирование блока путей

    После run(): stop_time (время остановки, горизонт для усечённых), stopped,
    height (конечная высота, 0 при попадании), position (конечная точка на торе),
    displacement (развёрнутое смещение B).
    """

    def __init__(self, cfg: PathConfig, w: WeightModel, rng: np.random.Generator, size: int,
                 start: Optional[Sequence[float]] = None, upper: Optional[float] = None,
                 with_torus: bool = True, killed: bool = True):
        self.cfg = cfg
        self.w = w
        self.rng = rng
        self.size = size
        self.upper = upper
        self.with_torus = with_torus
        self.killed = killed
        d = w.dimension
        if not with_torus:
            self.position = np.zeros((size, 0))
        elif start is None:
            self.position = rng.uniform(0.0, TWO_PI, size=(size, d))
        else:
            self.position = np.tile(np.mod(np.asarray(start, dtype=float), TWO_PI), (size, 1))
        self.displacement = np.zeros_like(self.position)
        self.height = np.full(size, cfg.y0)
        self.stop_time = np.full(size, cfg.horizon)
        self.stopped = np.zeros(size, dtype=bool)

    def _crossed(self, height: np.ndarray, new_height: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        if not self.killed:
            return np.zeros(height.shape[0], dtype=bool)
        if cfg.stop_level > 0:
            # остановка по значениям в узлах сетки - момент остановки
            return new_height <= cfg.stop_level
        crossed = new_height <= 0.0
        # вероятность пересечения 0 мостом с дисперсией 2 dt: exp(-b b' / dt)
        bridge = np.exp(-height * np.maximum(new_height, 0.0) / cfg.dt)
        if self.upper is not None:
            crossed |= new_height >= self.upper
            gap, new_gap = self.upper - height, np.maximum(self.upper - new_height, 0.0)
            bridge = 1.0 - (1.0 - bridge) * (1.0 - np.exp(-gap * new_gap / cfg.dt))
        u = self.rng.random(height.shape[0])
        return crossed | (u < bridge)

    def run(self, on_step: Optional[Callable[[StepView], None]] = None) -> "PathWalker":
        cfg = self.cfg
        d = self.w.dimension
        scale = math.sqrt(2.0 * cfg.dt)
        factor = self.w.factor
        alive = np.arange(self.size)
        for step in range(cfg.max_steps):
            if alive.size == 0:
                break
            height = self.height[alive]
            d_height = scale * self.rng.standard_normal(alive.size)
            if self.with_torus:
                noise = self.rng.standard_normal((alive.size, d))
                increment = scale * noise @ factor
                position = self.position[alive]
                new_position = position + increment
            else:
                noise = np.zeros((alive.size, 0))
                increment = noise
                position = new_position = self.position[alive]
            new_height = height + d_height
            stopped = self._crossed(height, new_height)
            if cfg.stop_level > 0:
                to_zero = stopped & (new_height <= 0.0)
            elif self.upper is not None:
                to_zero = stopped & (height < self.upper / 2.0)
            else:
                to_zero = stopped
            time = (step + 1) * cfg.dt
            if on_step is not None:
                on_step(StepView(alive, height, position, d_height, noise, new_height,
                                 new_position, stopped, to_zero, time, cfg.dt))
            self.height[alive] = new_height
            if self.with_torus:
                self.position[alive] = np.mod(new_position, TWO_PI)
                self.displacement[alive] += increment
            done = alive[stopped]
            self.stop_time[done] = time
            self.stopped[done] = True
            if self.upper is not None and cfg.stop_level == 0:
                self.height[alive[stopped & ~to_zero]] = self.upper
            self.height[alive[to_zero]] = 0.0
            alive = alive[~stopped]
        return self


@dataclass
class PathBatch:
    """Результаты моделирования: конечные состояния, времена остановки и накопленные интегралы"""

    config: PathConfig
    positions: np.ndarray
    heights: np.ndarray
    times: np.ndarray
    stopped: np.ndarray
    integrals: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return int(self.times.shape[0])

    @property
    def truncated_fraction(self) -> float:
        return float(np.mean(~self.stopped))

    @property
    def hit(self) -> np.ndarray:
        return self.stopped & (self.heights <= 0.0)

    @staticmethod
    def estimate(values: np.ndarray) -> Tuple[float, float]:
        """Среднее и стандартная ошибка"""
        values = np.asarray(values, dtype=float)
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))

    def to_frame(self) -> pd.DataFrame:
        """Таблица по путям: конечная точка, высота, время, признак остановки, интегралы"""
        data = {f"x_{i + 1}": self.positions[:, i] for i in range(self.positions.shape[1])}
        data.update({"height": self.heights, "time": self.times, "stopped": self.stopped})
        data.update(self.integrals)
        return pd.DataFrame(data)

    def write_tsv(self, path: str):
        self.to_frame().to_csv(path, sep="\t", index=False, float_format="%.17g")


def warn_truncation(cfg: PathConfig, fraction: float, label: str):
    if fraction > cfg.truncation_warning:
        logger.warning(f"{label}: доля усечённых путей {fraction:.1%} превышает {cfg.truncation_warning:.0%} "
                       f"(горизонт T={cfg.horizon:g}); используется точное условное дополнение")


def simulate_paths(cfg: PathConfig, w: WeightModel, integrands: Optional[Dict[str, Integrand]] = None,
                   start: Optional[Sequence[float]] = None,
                   drivers: Optional[Dict[str, int]] = None) -> PathBatch:
    """
    Моделирование путей (beta_t, B_t) до остановки beta или горизонта

    Args:
        cfg: Параметры моделирования
        w: Весовая модель (приращения B через множитель Холецкого)
        integrands: Подынтегральные выражения g(beta, B) для интегралов Ито
        start: Начальная точка B_0 (по умолчанию равномерное распределение на торе)
        drivers: Интегрирующий процесс для каждого выражения: 0 - beta (по умолчанию),
            i - i-я компонента W с dB = sum_i dW_i tau_i

    Returns:
        PathBatch: Конечные состояния и накопленные интегралы
    """
    integrands = integrands or {}
    drivers = drivers or {}
    for name, driver in drivers.items():
        if name not in integrands or not 0 <= driver <= w.dimension:
            raise ValueError(f"Некорректный интегрирующий процесс {driver} для '{name}'")
    positions, heights, times, stopped = [], [], [], []
    integrals: Dict[str, List[np.ndarray]] = {name: [] for name in integrands}
    for start_index, size, rng in block_generators(cfg):
        accumulated = {name: np.zeros(size) for name in integrands}

        def on_step(view: StepView):
            if not integrands:
                return
            d_height = view.effective_d_height
            for name, g in integrands.items():
                driver = drivers.get(name, 0)
                if driver == 0:
                    increment = d_height
                else:
                    increment = math.sqrt(2.0 * view.dt) * view.noise[:, driver - 1]
                accumulated[name][view.index] += g(view.height, view.position) * increment

        walker = PathWalker(cfg, w, rng, size, start).run(on_step)
        positions.append(walker.position)
        heights.append(walker.height)
        times.append(walker.stop_time)
        stopped.append(walker.stopped)
        for name in integrands:
            integrals[name].append(accumulated[name])
        logger.debug(f"Блок путей {start_index}..{start_index + size}: остановлено {walker.stopped.mean():.1%}")
    batch = PathBatch(cfg, np.vstack(positions), np.concatenate(heights), np.concatenate(times),
                      np.concatenate(stopped), {name: np.concatenate(v) for name, v in integrals.items()})
    warn_truncation(cfg, batch.truncated_fraction, "simulate_paths")
    return batch


def simulate_heights(cfg: PathConfig, upper: Optional[float] = None) -> PathBatch:
    """Только фоновое движение beta: время попадания в 0 (или выхода из (0, upper)) с поправкой моста"""
    if upper is not None and not upper > cfg.y0:
        raise ValueError(f"Верхняя граница должна быть > y0={cfg.y0}, получено: {upper}")
    dummy = WeightModel.power(1.0, 1)
    heights, times, stopped = [], [], []
    for _, size, rng in block_generators(cfg):
        walker = PathWalker(cfg, dummy, rng, size, upper=upper, with_torus=False).run()
        heights.append(walker.height)
        times.append(walker.stop_time)
        stopped.append(walker.stopped)
    batch = PathBatch(cfg, np.zeros((cfg.n_paths, 0)), np.concatenate(heights), np.concatenate(times),
                      np.concatenate(stopped))
    warn_truncation(cfg, batch.truncated_fraction, "simulate_heights")
    return batch
