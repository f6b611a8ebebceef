# src/stochastic/checks.py
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special, stats

from ..riesz.transforms import riesz_first, riesz_second
from ..semigroup.heat import poisson_apply
from ..spectral.fields import SpectralField
from ..spectral.weights import WeightModel
from ..utils.report import ExperimentReport
from .evaluation import SupportSpectrum, killed_resolvent, poisson_kernel
from .paths import (
    DEFAULT_COMPLETION_LEVEL,
    PathBatch,
    PathConfig,
    PathWalker,
    block_generators,
    simulate_heights,
    simulate_paths,
    warn_truncation,
)

logger = logging.getLogger(__name__)

AGREEMENT_SIGMAS = 3.0
# Погрешность округления для вырожденных случаев (нулевые интегранты)
ROUNDING_TOLERANCE = 1e-12
# Поправка на дискретизацию квадратичной вариации: BIAS_FACTOR * dt * sum lambda |c|^2
BIAS_FACTOR = 10.0
DEFAULT_BINS = 16
DEFAULT_SIGNIFICANCE = 0.01
PANEL_SIZE = 20
PANEL_REQUIRED = 0.95
# Отношение стандартных ошибок при увеличении числа путей в 10 раз
SCALING_WINDOW = (2.8, 3.5)
WRAPPED_SERIES_CUTOFF = 1e-17
WRAPPED_SERIES_TERMS = 10_000


def _check_real(field: SpectralField, w: WeightModel, name: str):
    if field.d != w.dimension:
        raise ValueError(f"Размерность поля {name} ({field.d}) не совпадает с моделью ({w.dimension})")
    if not field.is_real():
        raise ValueError(f"Поле {name} должно быть вещественным")


def _check_pair(h: SpectralField, f: SpectralField, w: WeightModel):
    _check_real(h, w, "h")
    _check_real(f, w, "f")
    if h.lattice != f.lattice:
        raise ValueError(f"Поля h и f заданы на разных решётках: {h.lattice.bandwidths} и {f.lattice.bandwidths}")
    for name, field in (("h", h), ("f", f)):
        if not field.is_mean_zero():
            raise ValueError(f"Поле {name} должно иметь нулевое среднее, c_0={field.mean:.3e}")


def _check_index(i: int, w: WeightModel):
    if not 1 <= i <= w.dimension:
        raise IndexError(f"Индекс направления {i} вне диапазона 1..{w.dimension}")


def _inner(h: SpectralField, g: SpectralField) -> float:
    """<h, g> по нормированной мере Хаара для вещественных полей"""
    return float(np.sum(h.coefficients * np.conj(g.coefficients)).real)


def _completion_config(cfg: PathConfig) -> PathConfig:
    """Остановка на уровне для оценок с точным условным дополнением"""
    if cfg.stop_level > 0:
        return cfg
    return cfg.with_updates(stop_level=min(DEFAULT_COMPLETION_LEVEL, cfg.y0 / 2.0))


@dataclass
class PairingEstimate:
    """Оценка спаривания Монте-Карло против спектрального эталона при конечном y0"""

    label: str
    estimate: float
    stderr: float
    reference: float
    limit: float
    truncated_fraction: float
    n_paths: int
    y0: float
    dt: float

    @property
    def z_score(self) -> float:
        gap = self.estimate - self.reference
        if self.stderr > 0:
            return gap / self.stderr
        return 0.0 if abs(gap) <= ROUNDING_TOLERANCE else math.copysign(math.inf, gap)

    @property
    def limit_gap(self) -> float:
        """Относительное расхождение эталона при конечном y0 и предела y0 -> inf"""
        if self.limit == 0.0:
            return abs(self.reference)
        return abs(self.reference - self.limit) / abs(self.limit)

    def agrees(self, sigmas: float = AGREEMENT_SIGMAS) -> bool:
        return abs(self.estimate - self.reference) <= sigmas * self.stderr + ROUNDING_TOLERANCE

    def to_dict(self) -> Dict[str, float]:
        return {
            "label": self.label,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "reference": self.reference,
            "limit": self.limit,
            "limit_gap": self.limit_gap,
            "z_score": self.z_score,
            "truncated_fraction": self.truncated_fraction,
            "n_paths": self.n_paths,
            "y0": self.y0,
            "dt": self.dt,
        }

    def to_report(self, sigmas: float = AGREEMENT_SIGMAS) -> ExperimentReport:
        report = ExperimentReport(name=f"mc-pairing[{self.label}]", tag="martingale-representation")
        report.record(sigmas * self.stderr - abs(self.estimate - self.reference),
                      {"label": self.label, "z_score": self.z_score}, ROUNDING_TOLERANCE)
        report.constants.update(self.to_dict())
        report.tables["mc_pairing"] = pd.DataFrame([self.to_dict()])
        return report


def _run_pairing(label: str, sh: SupportSpectrum, sf: SupportSpectrum, cfg: PathConfig, w: WeightModel,
                 integrand_symbol: np.ndarray, driver: int, h_symbol: np.ndarray, limit: float,
                 output: Optional[str]) -> PairingEstimate:
    """
    Оценка E[h(B_tau) int_0^tau g dW] с точным дополнением после остановки

    Для пути, остановленного в состоянии (y, x), вклад равен
    Qh(y, x) I + 2 sum_{n,m} a_n h_n b_m f_m e^{i(n+m).x} K(y, lambda(n+m), sqrt(lambda(n)) + sqrt(lambda(m))),
    где K - резольвента убиваемого в 0 движения; при y = 0 дополнение равно 0.
    """
    cfg = _completion_config(cfg)
    pairs = sh.pair(sf, h_symbol, integrand_symbol, w)
    batch = simulate_paths(cfg, w, {"integral": lambda y, x: sf.values(y, x, integrand_symbol)},
                           drivers={"integral": driver})
    completion = 2.0 * pairs.values(batch.heights, batch.positions, killed_resolvent)
    values = sh.values(batch.heights, batch.positions) * batch.integrals["integral"] + completion
    estimate, stderr = PathBatch.estimate(values)
    reference = 2.0 * pairs.mean_over_torus(cfg.y0, killed_resolvent)
    result = PairingEstimate(label, estimate, stderr, reference, limit, batch.truncated_fraction,
                             batch.n_paths, cfg.y0, cfg.dt)
    if output:
        batch.integrals["estimator"] = values
        batch.write_tsv(output)
        logger.info(f"Данные по путям записаны в {output}")
    logger.info(f"Спаривание {label}: {estimate:.6f} ± {stderr:.6f}, эталон {reference:.6f}, "
                f"предел {limit:.6f}, z={result.z_score:.2f}")
    return result


def mc_riesz_pairing(h: SpectralField, f: SpectralField, i: int, cfg: PathConfig, w: WeightModel,
                     output: Optional[str] = None) -> PairingEstimate:
    """
    Монте-Карло оценка E_{y0}[h(B_tau) int_0^tau X_i Qf(beta_s, B_s) dbeta_s] при равномерном B_0

    Эталон при конечном y0: 2 sum_n (-sqrt(lambda(n))) h_n (i tau_i.(-n)) f_{-n} (1 - e^{-2 y0 sqrt(lambda(n))}) / (4 lambda(n));
    предел y0 -> inf равен -(1/2) <h, R_i f>.

    Args:
        h: Вещественное поле с нулевым средним
        f: Вещественное поле с нулевым средним на той же решётке
        i: Направление, 1 <= i <= d
        cfg: Параметры моделирования
        w: Весовая модель
        output: Путь к TSV с данными по путям (необязательно)

    Returns:
        PairingEstimate: Оценка, стандартная ошибка, эталон, предел и z-оценка
    """
    _check_pair(h, f, w)
    _check_index(i, w)
    sh, sf = SupportSpectrum.of(h, w), SupportSpectrum.of(f, w)
    limit = -0.5 * _inner(h, riesz_first(f, i, w))
    return _run_pairing(f"R{i}", sh, sf, cfg, w, sf.direction(i, w), 0, -sh.sqrt_lam, limit, output)


def mc_second_order_pairing(h: SpectralField, f: SpectralField, i: int, j: int, cfg: PathConfig,
                            w: WeightModel, output: Optional[str] = None) -> PairingEstimate:
    """
    E[h(B_tau) int_0^tau X_j Qf dW_i]: спаривание второго порядка, предел -(1/2) <h, R_i R_j f>

    W_i - компонента броуновского движения вдоль tau_i (dB = sum_i dW_i tau_i).
    """
    _check_pair(h, f, w)
    _check_index(i, w)
    _check_index(j, w)
    sh, sf = SupportSpectrum.of(h, w), SupportSpectrum.of(f, w)
    limit = -0.5 * _inner(h, riesz_second(f, i, j, w))
    return _run_pairing(f"R{i}R{j}", sh, sf, cfg, w, sf.direction(j, w), i, sh.direction(i, w), limit, output)


def _quadratic_variation(sf: SupportSpectrum, cfg: PathConfig, w: WeightModel) -> Tuple[np.ndarray, ...]:
    """По путям: реализованная сумма (dM)^2, дискретный интеграл 2 int Gamma ds и дополнение после остановки"""
    d = w.dimension
    dy = -sf.sqrt_lam
    dx = [sf.direction(i, w) for i in range(1, d + 1)]
    square = sf.pair(sf, np.ones(sf.size), np.ones(sf.size), w)
    realized_all, discrete_all, completion_all, stopped_all = [], [], [], []
    for _, size, rng in block_generators(cfg):
        walker = PathWalker(cfg, w, rng, size)
        current = sf.values(np.full(size, cfg.y0), walker.position)
        realized = np.zeros(size)
        discrete = np.zeros(size)

        def on_step(view):
            rate = sf.values(view.height, view.position, dy) ** 2
            for symbol in dx:
                rate += sf.values(view.height, view.position, symbol) ** 2
            discrete[view.index] += 2.0 * rate * view.dt
            new = sf.values(np.maximum(view.new_height, 0.0), view.new_position)
            realized[view.index] += (new - current[view.index]) ** 2
            current[view.index] = new

        walker.run(on_step)
        completion = square.values(walker.height, walker.position, poisson_kernel) - current ** 2
        realized_all.append(realized)
        discrete_all.append(discrete)
        completion_all.append(completion)
        stopped_all.append(walker.stopped)
    return (np.concatenate(realized_all), np.concatenate(discrete_all),
            np.concatenate(completion_all), np.concatenate(stopped_all))


def quadratic_variation_check(f: SpectralField, cfg: PathConfig, w: WeightModel,
                              richardson: bool = False) -> ExperimentReport:
    """
    Квадратичная вариация M_s = Qf(beta_s, B_s): реализованная сумма (dM)^2 против
    дискретного 2 int (|d_y Qf|^2 + sum_i |X_i Qf|^2) ds и против точного среднего
    sum_n |c_n|^2 (1 - e^{-2 y0 sqrt(lambda(n))}) при равномерном B_0

    Args:
        f: Вещественное поле
        cfg: Параметры моделирования
        w: Весовая модель
        richardson: Повторить при dt/2 и сообщить отношение смещений

    Returns:
        ExperimentReport: Оценки, стандартные ошибки и допуски
    """
    _check_real(f, w, "f")
    cfg = _completion_config(cfg)
    sf = SupportSpectrum.of(f, w)
    power = np.abs(sf.coefs) ** 2
    reference = float(np.sum(power * -np.expm1(-2.0 * cfg.y0 * sf.sqrt_lam)))
    allowance = BIAS_FACTOR * cfg.dt * float(np.sum(sf.lam * power))

    report = ExperimentReport(name="quadratic-variation", tag="quadratic-variation")
    rows = []
    biases = []
    configs = [cfg, cfg.with_updates(dt=cfg.dt / 2.0, max_steps=2 * cfg.max_steps)] if richardson else [cfg]
    for run_cfg in configs:
        realized, discrete, completion, stopped = _quadratic_variation(sf, run_cfg, w)
        truncated = float(np.mean(~stopped))
        warn_truncation(run_cfg, truncated, "quadratic_variation_check")
        total, total_se = PathBatch.estimate(realized + completion)
        bias, bias_se = PathBatch.estimate(realized - discrete)
        run_allowance = BIAS_FACTOR * run_cfg.dt * float(np.sum(sf.lam * power))
        witness = {"dt": run_cfg.dt}
        report.record(AGREEMENT_SIGMAS * total_se + run_allowance - abs(total - reference),
                      dict(witness, check="reference"), ROUNDING_TOLERANCE)
        report.record(AGREEMENT_SIGMAS * bias_se + run_allowance - abs(bias),
                      dict(witness, check="paired"), ROUNDING_TOLERANCE)
        biases.append(bias)
        rows.append({"dt": run_cfg.dt, "qv_estimate": total, "qv_stderr": total_se, "reference": reference,
                     "realized_mean": float(realized.mean()), "discrete_mean": float(discrete.mean()),
                     "paired_bias": bias, "paired_stderr": bias_se, "allowance": run_allowance,
                     "truncated_fraction": truncated})
    report.tables["quadratic_variation"] = pd.DataFrame(rows)
    report.constants.update(rows[0])
    report.constants["allowance"] = allowance
    if richardson:
        report.constants["bias_ratio"] = biases[0] / biases[1] if biases[1] != 0 else math.inf
        report.notes.append("отношение смещений при dt и dt/2 близко к 2 для слабой ошибки первого порядка")
    logger.info(f"Квадратичная вариация: {rows[0]['qv_estimate']:.6f} ± {rows[0]['qv_stderr']:.6f}, "
                f"эталон {reference:.6f}, смещение {rows[0]['paired_bias']:.2e}")
    return report


def subordination_check(f: SpectralField, y: float, cfg: PathConfig, w: WeightModel,
                        point: Optional[Sequence[float]] = None) -> ExperimentReport:
    """
    Подчинение: E[H_tau f(x0)] при tau - время попадания фонового движения из y в 0
    против Q_y f(x0)

    Усечённые пути дополняются точно: E[e^{-lambda tau} | beta_T] = e^{-lambda T} e^{-beta_T sqrt(lambda)}.
    Время попадания берётся в середине шага, на котором зафиксировано пересечение.

    Args:
        f: Вещественное поле
        y: Начальная высота, y >= 0
        cfg: Параметры моделирования (y0 заменяется на y)
        w: Весовая модель
        point: Точка x0 (по умолчанию начало координат)

    Returns:
        ExperimentReport: Оценка, эталон и запас
    """
    _check_real(f, w, "f")
    if y < 0:
        raise ValueError(f"Высота y должна быть >= 0, получено: {y}")
    point = np.zeros(w.dimension) if point is None else np.asarray(point, dtype=float)
    reference = float(SupportSpectrum.of(poisson_apply(f, y, w), w).values(np.zeros(1), point[None, :])[0])
    report = ExperimentReport(name="subordination", tag="subordination")
    if y == 0:
        report.record(0.0, {"y": 0.0})
        report.constants.update({"estimate": reference, "stderr": 0.0, "reference": reference, "y": 0.0})
        return report

    run_cfg = cfg.with_updates(y0=float(y), stop_level=0.0)
    batch = simulate_heights(run_cfg)
    sf = SupportSpectrum.of(f, w)
    hit = batch.stopped
    values = np.empty(batch.n_paths)
    values[hit] = sf.at_times(batch.times[hit] - run_cfg.dt / 2.0, point)
    values[~hit] = sf.at_times(batch.times[~hit], point, extra_height=batch.heights[~hit])
    estimate, stderr = PathBatch.estimate(values)
    allowance = run_cfg.dt * float(np.sum(sf.lam * np.abs(sf.coefs)))
    report.record(AGREEMENT_SIGMAS * stderr + allowance - abs(estimate - reference),
                  {"y": y, "point": point.tolist()}, ROUNDING_TOLERANCE)
    report.constants.update({"estimate": estimate, "stderr": stderr, "reference": reference, "y": y,
                             "allowance": allowance, "truncated_fraction": batch.truncated_fraction})
    logger.info(f"Подчинение при y={y}: {estimate:.6f} ± {stderr:.6f}, Q_y f(x0) = {reference:.6f}")
    return report


def exit_time_check(cfg: PathConfig) -> ExperimentReport:
    """
    Среднее время выхода фонового движения из полосы (0, 2 y0): y0^2 / 2 при генераторе d^2/dy^2

    Усечённые пути дополняются точным условным средним h (2 y0 - h) / 2.
    """
    upper = 2.0 * cfg.y0
    run_cfg = cfg.with_updates(stop_level=0.0)
    batch = simulate_heights(run_cfg, upper=upper)
    times = np.where(batch.stopped, batch.times - run_cfg.dt / 2.0,
                     batch.times + batch.heights * (upper - batch.heights) / 2.0)
    estimate, stderr = PathBatch.estimate(times)
    expected = cfg.y0 ** 2 / 2.0
    report = ExperimentReport(name="exit-time", tag="background-normalisation")
    report.record(AGREEMENT_SIGMAS * stderr + run_cfg.dt - abs(estimate - expected), {"y0": cfg.y0})
    report.constants.update({"estimate": estimate, "stderr": stderr, "expected": expected,
                             "truncated_fraction": batch.truncated_fraction})
    logger.info(f"Время выхода из (0, {upper:g}): {estimate:.4f} ± {stderr:.4f}, ожидается {expected:.4f}")
    return report


def hitting_law_check(cfg: PathConfig, significance: float = DEFAULT_SIGNIFICANCE) -> ExperimentReport:
    """
    Закон времени попадания в 0: P(tau <= s) = erfc(y0 / (2 sqrt(s))); статистика
    Колмогорова-Смирнова по (0, T], пути после горизонта цензурируются

    Args:
        cfg: Параметры моделирования
        significance: Уровень значимости

    Returns:
        ExperimentReport: D, p-значение и запас p - significance
    """
    run_cfg = cfg.with_updates(stop_level=0.0)
    batch = simulate_heights(run_cfg)
    n = batch.n_paths
    times = np.sort(batch.times[batch.stopped] - run_cfg.dt / 2.0)
    cdf = special.erfc(cfg.y0 / (2.0 * np.sqrt(times)))
    ranks = np.arange(1, times.size + 1)
    at_horizon = abs(times.size / n - float(special.erfc(cfg.y0 / (2.0 * math.sqrt(run_cfg.horizon)))))
    statistic = max(at_horizon, float(np.max(ranks / n - cdf, initial=0.0)),
                    float(np.max(cdf - (ranks - 1) / n, initial=0.0)))
    pvalue = float(stats.kstwo.sf(statistic, n))
    report = ExperimentReport(name="hitting-law", tag="background-normalisation")
    report.record(pvalue - significance, {"statistic": statistic})
    report.constants.update({"statistic": statistic, "pvalue": pvalue, "n_paths": n,
                             "truncated_fraction": batch.truncated_fraction})
    logger.info(f"Закон времени попадания: D={statistic:.4f}, p={pvalue:.3f}")
    return report


def wrapped_marginal_probabilities(y0: float, a: float, bins: int) -> np.ndarray:
    """Вероятности интервалов [2 pi k / bins, 2 pi (k+1) / bins) для B^i_tau при B_0 = 0"""
    edges = np.linspace(0.0, 2.0 * np.pi, bins + 1)
    probs = np.full(bins, 1.0 / bins)
    r = math.exp(-y0 * math.sqrt(a))
    if r == 0.0:
        return probs
    terms = min(WRAPPED_SERIES_TERMS, max(1, math.ceil(math.log(WRAPPED_SERIES_CUTOFF) / math.log(r))))
    k = np.arange(1, terms + 1)[:, None]
    sines = np.sin(k * edges[None, :])
    probs += ((r ** k / k) * (sines[:, 1:] - sines[:, :-1])).sum(axis=0) / np.pi
    return probs


def _terminal_points(cfg: PathConfig, w: WeightModel) -> Tuple[np.ndarray, float]:
    """B_tau при B_0 = 0; усечённые пути досэмплируются точно: tau' = h^2 / (2 Z^2), B' ~ N(0, 2 A tau')"""
    points, truncated = [], []
    for _, size, rng in block_generators(cfg):
        walker = PathWalker(cfg, w, rng, size, start=np.zeros(w.dimension)).run()
        alive = ~walker.stopped
        if alive.any():
            z = rng.standard_normal(int(alive.sum()))
            remaining = walker.height[alive] ** 2 / (2.0 * z ** 2)
            noise = rng.standard_normal((remaining.size, w.dimension))
            walker.position[alive] += np.sqrt(2.0 * remaining)[:, None] * (noise @ w.factor)
        points.append(np.mod(walker.position, 2.0 * np.pi))
        truncated.append(alive)
    return np.vstack(points), float(np.mean(np.concatenate(truncated)))


def terminal_uniformity_check(cfg: PathConfig, w: WeightModel, bins: int = DEFAULT_BINS,
                              significance: float = DEFAULT_SIGNIFICANCE) -> ExperimentReport:
    """
    Закон конечных точек B_tau: критерий хи-квадрат по одномерным маргиналам

    Ожидаемые частоты берутся из точного закона (ядро Пуассона на окружности с
    r = e^{-y0 sqrt(a_ii)}), который при больших y0 становится равномерным.
    Уровень significance делится между d маргиналами.
    """
    run_cfg = cfg.with_updates(stop_level=0.0)
    points, truncated = _terminal_points(run_cfg, w)
    n, d = points.shape
    report = ExperimentReport(name="terminal-uniformity", tag="terminal-law")
    rows = []
    for i in range(d):
        probs = wrapped_marginal_probabilities(cfg.y0, float(w.gram[i, i]), bins)
        counts, _ = np.histogram(points[:, i], bins=bins, range=(0.0, 2.0 * np.pi))
        expected = n * probs
        statistic, pvalue = stats.chisquare(counts, expected * counts.sum() / expected.sum())
        report.record(float(pvalue) - significance / d, {"coordinate": i + 1})
        rows.append({"coordinate": i + 1, "statistic": float(statistic), "pvalue": float(pvalue),
                     "uniform_deviation": float(np.max(np.abs(probs - 1.0 / bins)))})
    report.tables["terminal_uniformity"] = pd.DataFrame(rows)
    report.constants.update({"min_pvalue": min(r["pvalue"] for r in rows), "truncated_fraction": truncated,
                             "uniform_deviation": max(r["uniform_deviation"] for r in rows)})
    return report


def coordinate_variance_check(cfg: PathConfig, w: WeightModel, t: float) -> ExperimentReport:
    """
    Ковариация смещения B_t - B_0 без убивания: 2 A t (для диагональных весов 2 a_i t)

    Args:
        cfg: Параметры моделирования (используются dt, n_paths, seed)
        w: Весовая модель
        t: Время, кратное dt с округлением

    Returns:
        ExperimentReport: Оценки E[dB_i dB_j] против 2 A_ij t
    """
    if not t > 0:
        raise ValueError(f"Время t должно быть > 0, получено: {t}")
    steps = max(1, int(round(t / cfg.dt)))
    run_cfg = cfg.with_updates(max_steps=steps)
    horizon = run_cfg.horizon
    displacements = []
    for _, size, rng in block_generators(run_cfg):
        walker = PathWalker(run_cfg, w, rng, size, start=np.zeros(w.dimension), killed=False).run()
        displacements.append(walker.displacement)
    X = np.vstack(displacements)
    report = ExperimentReport(name="coordinate-variance", tag="generator-normalisation")
    rows = []
    for i in range(w.dimension):
        for j in range(i, w.dimension):
            mean, stderr = PathBatch.estimate(X[:, i] * X[:, j])
            expected = 2.0 * float(w.gram[i, j]) * horizon
            report.record(AGREEMENT_SIGMAS * stderr - abs(mean - expected), {"i": i + 1, "j": j + 1},
                          ROUNDING_TOLERANCE)
            rows.append({"i": i + 1, "j": j + 1, "estimate": mean, "stderr": stderr, "expected": expected})
    report.tables["coordinate_variance"] = pd.DataFrame(rows)
    report.constants["t"] = horizon
    return report


@dataclass(frozen=True)
class PairingCase:
    """Случай спаривания для панели: первый порядок при j = None"""

    label: str
    h: SpectralField
    f: SpectralField
    i: int
    j: Optional[int] = None

    def run(self, cfg: PathConfig, w: WeightModel) -> PairingEstimate:
        if self.j is None:
            return mc_riesz_pairing(self.h, self.f, self.i, cfg, w)
        return mc_second_order_pairing(self.h, self.f, self.i, self.j, cfg, w)


def pairing_panel(cases: Sequence[PairingCase], cfg: PathConfig, w: WeightModel, size: int = PANEL_SIZE,
                  required: float = PANEL_REQUIRED) -> ExperimentReport:
    """
    Панель из size экспериментов: случай k % len(cases), зерно cfg.seed + k;
    доля согласий в пределах 3 SE должна быть не ниже required
    """
    if not cases:
        raise ValueError("Панель спариваний пуста")
    rows: List[dict] = []
    for k in range(size):
        case = cases[k % len(cases)]
        result = case.run(cfg.with_updates(seed=cfg.seed + k), w)
        rows.append(dict(result.to_dict(), label=case.label, seed=cfg.seed + k, agrees=result.agrees()))
    fraction = float(np.mean([row["agrees"] for row in rows]))
    report = ExperimentReport(name="pairing-panel", tag="martingale-representation")
    report.record(fraction - required, {"agreement": fraction})
    report.constants.update({"agreement": fraction, "size": size})
    report.tables["pairing_panel"] = pd.DataFrame(rows)
    logger.info(f"Панель спариваний: согласие {fraction:.0%} из {size}")
    return report


def stderr_scaling_check(case: PairingCase, cfg: PathConfig, w: WeightModel, factor: int = 10) -> ExperimentReport:
    """Отношение стандартных ошибок при n_paths и factor * n_paths должно быть около sqrt(factor)"""
    small = case.run(cfg, w)
    large = case.run(cfg.with_updates(n_paths=cfg.n_paths * factor), w)
    ratio = small.stderr / large.stderr if large.stderr > 0 else math.inf
    scale = math.sqrt(factor / 10.0)
    lower, upper = SCALING_WINDOW[0] * scale, SCALING_WINDOW[1] * scale
    report = ExperimentReport(name="stderr-scaling", tag="estimator-consistency")
    report.record(min(ratio - lower, upper - ratio), {"ratio": ratio, "factor": factor})
    report.constants.update({"ratio": ratio, "window": [lower, upper], "factor": factor})
    return report
