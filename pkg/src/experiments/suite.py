# src/experiments/suite.py
"""
Наборы критериев приёмки: полный (acceptance) и быстрый (quick).

Критерий - именованный набор отчётов; критерий выполнен, если выполнены все его отчёты.
Итог пишется одним JSON-файлом suite_<name>.json.
"""
import json
import logging
import math
import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..geometry.bounds import verify_gaussian_bound
from ..geometry.sampler import point_sample
from ..poisson.solver import solve_poisson, tail_operator
from ..riesz.bounds import estimate_operator_ratio
from ..riesz.transforms import RieszSymbol, riesz_second, riesz_vector_norm
from ..semigroup.heat import heat_apply
from ..spectral.dictionary import trial_dictionary
from ..spectral.fields import SpectralField
from ..spectral.lattice import FrequencyLattice
from ..spectral.norms import lp_norm
from ..spectral.random_fields import DecayProfile, random_field
from ..spectral.transforms import transform_forward, transform_inverse
from ..spectral.weights import WeightModel
from ..utils.numeric import log_grid
from ..utils.report import ExperimentReport, to_serializable
from .config import DEFAULT_OUTPUT_DIR, SCHEMA_VERSION, ConfigError, resolve_config
from .runner import EXIT_FAILED, EXIT_OK, build_reports

logger = logging.getLogger(__name__)

SUITE_FILE = "suite_{name}.json"
EXACTNESS_TOLERANCE = 1e-10
EXACTNESS_TIMES = (0.05, 0.3)
MU_ONE_T2 = 1.8375741
LAMBDA_COS_A4 = 0.8577639
LIPSCHITZ_COS_A4 = 2.0


@dataclass(frozen=True)
class Criterion:
    """Критерий приёмки: идентификатор, описание и построитель отчётов"""

    key: str
    title: str
    build: Callable[[], List[ExperimentReport]]


def expectation(name: str, value: float, target: float, tolerance: float) -> ExperimentReport:
    """Отчёт о совпадении value с target в пределах tolerance"""
    report = ExperimentReport(name=name, tag="closed-form")
    report.record(tolerance - abs(value - target), {"value": value, "target": target})
    report.constants.update({"value": value, "target": target, "tolerance": tolerance})
    return report


def upper_limit(name: str, value: float, limit: float) -> ExperimentReport:
    report = ExperimentReport(name=name, tag="closed-form")
    report.record(limit - value, {"value": value, "limit": limit})
    report.constants.update({"value": value, "limit": limit})
    return report


def experiment(kind: str, weights: str, d: int, params: Dict[str, Any], seed: int = 0,
               bandwidth: Optional[int] = None, bandwidths: Optional[Sequence[int]] = None) -> List[ExperimentReport]:
    """Отчёты эксперимента по конфигурации без записи файлов"""
    config: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "kind": kind, "weights": weights, "d": d,
                              "seed": seed, "params": params}
    if bandwidth is not None:
        config["bandwidth"] = bandwidth
    if bandwidths is not None:
        config["bandwidths"] = list(bandwidths)
    resolved = resolve_config(config)
    return build_reports(resolved, resolved["output_dir"])


def spectral_exactness_check(lattice: FrequencyLattice, w: WeightModel, count: int,
                             seed: int = 0) -> ExperimentReport:
    """
    Точные тождества спектрального ядра на count случайных полях с нулевым средним

    Равенство Парсеваля, обратимость преобразования, полугрупповой закон,
    сохранение среднего, sum_j R_j^2 = -I и ||R^G f||_2 = ||f||_2.
    """
    report = ExperimentReport(name="spectral-exactness", tag="spectral-core")
    s, t = EXACTNESS_TIMES
    worst: Dict[str, float] = {}
    for k in range(count):
        f = random_field(lattice, seed + k, DecayProfile.parse("polynomial:1.5"))
        g = f + SpectralField.constant(lattice, 1.0)
        grid = transform_inverse(f)
        scale = max(f.l2_norm(), 1.0)
        residuals = {
            "parseval": abs(lp_norm(grid, 2.0) - f.l2_norm()),
            "round_trip": transform_forward(grid).max_difference(f),
            "semigroup": heat_apply(heat_apply(f, s, w), t, w).max_difference(heat_apply(f, s + t, w)),
            "mass": abs(heat_apply(g, t, w).mean - g.mean),
            "riesz_square_sum": _riesz_square_sum(f, w).max_difference(-f),
            "riesz_vector_l2": abs(riesz_vector_norm(f, 2.0, w) - f.l2_norm()),
        }
        for name, value in residuals.items():
            report.record(EXACTNESS_TOLERANCE * scale - value, {"field": k, "identity": name})
            worst[name] = max(worst.get(name, 0.0), value)
    report.constants = {f"max_{name}": value for name, value in worst.items()}
    report.constants["fields"] = count
    return report


def _riesz_square_sum(f, w: WeightModel):
    total = riesz_second(f, 1, 1, w)
    for j in range(2, w.dimension + 1):
        total = total + riesz_second(f, j, j, w)
    return total


def _constant(reports: Sequence[ExperimentReport], name: str, key: str) -> float:
    for report in reports:
        if report.name == name:
            return float(report.constants[key])
    raise KeyError(f"Отчёт {name} не найден")


# --- критерии полного набора ---

def _exactness(count: int) -> Callable[[], List[ExperimentReport]]:
    def build():
        w = WeightModel.explicit([1.0, 2.0, 4.0])
        return [spectral_exactness_check(FrequencyLattice((8, 8, 8)), w, count)]
    return build


def _analyticity() -> List[ExperimentReport]:
    return experiment("kernel-bounds", "explicit:1,2,4", 3, {
        "checks": ["analyticity"], "ps": [1.25, 2.0, 4.0], "orders": [1, 2],
        "tmin": 1e-4, "tmax": 10.0, "tpoints": 240, "trials": 34,
    }, bandwidths=(8, 8, 8))


def _riesz(ps: Sequence[float], trials: int) -> Callable[[], List[ExperimentReport]]:
    def build():
        reports = experiment("riesz-bounds", "power:0.5", 4,
                             {"ps": list(ps), "operators": ["R1", "RG", "R1R2"], "trials": trials})
        w = WeightModel.power(0.5, 4)
        lattice = FrequencyLattice.for_weights(w, 8)
        single = estimate_operator_ratio(RieszSymbol(2, (1, 1), w), 2.0, trial_dictionary(lattice, 0, trials))
        reports.append(single)
        reports.append(expectation("riesz-ratio-R1R1-p2", single.constants["best_ratio"], 1.0, 1e-10))
        return reports
    return build


def _classification(t_points: int) -> List[ExperimentReport]:
    reports = []
    power = experiment("classify", "power:0.5", 3, {"lambdas": [0.5], "tmin": 1e-6, "tpoints": t_points})
    table = power[0].tables["ck_classification"]
    reports += power
    reports.append(expectation("fitted-exponent-power", power[0].constants["fitted_exponent"], 0.5, 0.05))
    reports.append(expectation("stabilized-power", float(table["stabilized"].all()), 1.0, 0.0))

    lambdas = [round(0.1 * k, 1) for k in range(1, 10)]
    geometric = experiment("classify", "geometric:1", 3, {"lambdas": lambdas, "tmin": 1e-12, "tpoints": t_points})
    reports += geometric
    stabilized = geometric[0].tables["ck_classification"]["stabilized"]
    reports.append(expectation("stabilized-geometric", float(stabilized.all()), 1.0, 0.0))
    return reports


def _gaussian_bound() -> List[ExperimentReport]:
    w = WeightModel.power(0.5, 4)
    t_grid = log_grid(1e-4, 1.0, 40)
    base = verify_gaussian_bound(w, 0.5, t_grid, point_sample(4, 200, 0))
    doubled = verify_gaussian_bound(w, 0.5, t_grid, point_sample(4, 400, 0))
    reports = [base, doubled]
    if base.passed and doubled.passed:
        c_base, c_doubled = base.constants["C"], doubled.constants["C"]
        reports.append(upper_limit("gaussian-C-stability", abs(c_doubled - c_base) / c_base, 0.2))
    return reports


def _kernel_value() -> List[ExperimentReport]:
    reports = experiment("kernel-bounds", "explicit:1,4", 2, {"checks": ["kernel-value"], "kernel_t": 1.0})
    reports.append(expectation("mu-1-T2", _constant(reports, "kernel-value", "mu_t_e"), MU_ONE_T2, 1e-5))
    return reports


def _differentiability() -> List[ExperimentReport]:
    return experiment("kernel-bounds", "explicit:1,2,4", 3, {
        "checks": ["differentiability"], "orders": [1, 2], "tmin": 1e-3, "tmax": 10.0, "tpoints": 40,
        "trials": 10,
    }, bandwidths=(8, 8, 8))


def _seminorm_closed_forms(with_herz: bool) -> Callable[[], List[ExperimentReport]]:
    def build():
        base = {"field": "cos:1", "theta": 1.0, "order": 1, "p": "inf"}
        semigroup = experiment("seminorm", "explicit:4", 1, dict(base, scale="Lambda"), bandwidth=4)
        reports = semigroup + [expectation("Lambda-cos-a4", semigroup[0].constants["value"], LAMBDA_COS_A4, 1e-4)]
        if not with_herz:
            return reports
        distance = experiment("seminorm", "explicit:4", 1, dict(base, scale="L"), bandwidth=4)
        value = distance[0].constants["value"]
        reports += distance
        reports.append(expectation("L-cos-a4", value, LIPSCHITZ_COS_A4 * (1.0 - 0.5e-3), 1e-3))
        reports.append(expectation("L-cos-a4-boundary", float(distance[0].constants["boundary_attained"]), 1.0, 0.0))
        reports += experiment("seminorm-compare", "power:0.5", 3,
                              {"comparisons": ["herz"], "backward_theta": 0.5, "p": 2.0, "count": 50})
        return reports
    return build


def _scale_comparison() -> List[ExperimentReport]:
    return experiment("seminorm-compare", "power:0.5", 3, {
        "comparisons": ["forward", "backward"], "theta": 0.9, "lam": 0.1, "p": 2.0,
        "backward_theta": 0.5, "count": 50,
    })


def _poisson_regularity() -> List[ExperimentReport]:
    reports = experiment("poisson-regularity", "power:0.5", 6, {
        "p": 2.0, "theta": 0.5, "lam": 0.1, "profile": "spectral:1.5", "count": 30, "scales": ["Lp"],
    }, bandwidth=4)
    w = WeightModel.power(0.5, 6)
    lattice = FrequencyLattice.for_weights(w, 4)
    f = random_field(lattice, 0, DecayProfile.parse("spectral:1.5"), weights=w)
    full = tail_operator(solve_poisson(f, w), 1, w)
    reports.append(upper_limit("poisson-full-sum", full.max_difference(-f), EXACTNESS_TOLERANCE))
    return reports


def _martingale(n_paths: int, max_steps: int) -> Callable[[], List[ExperimentReport]]:
    def build():
        reports = experiment("mc-riesz", "explicit:1", 1, {
            "checks": ["pairing", "exit-time"], "h": "sin:1", "f": "cos:1", "i": 1,
            "n_paths": n_paths, "dt": 1e-3, "y0": 3.0, "max_steps": max_steps,
        }, seed=11, bandwidth=2)
        pairing = next(report for report in reports if report.name.startswith("mc-pairing"))
        reports.append(upper_limit("pairing-reference-gap", pairing.constants["limit_gap"], 3e-3))
        reports.append(upper_limit("pairing-stderr", pairing.constants["stderr"], 0.01 * math.sqrt(1e5 / n_paths)))
        return reports
    return build


def _finite_difference() -> List[ExperimentReport]:
    return experiment("kernel-bounds", "explicit:1,2,4", 3, {"checks": ["finite-difference"], "trials": 10},
                      bandwidths=(8, 8, 8))


SUITES: Dict[str, List[Criterion]] = {
    "acceptance": [
        Criterion("spectral-exactness", "Точные тождества спектрального ядра", _exactness(100)),
        Criterion("analyticity", "Константы аналитичности", _analyticity),
        Criterion("riesz-bounds", "Оценки преобразований Рисса", _riesz([1.25, 1.5, 2.0, 3.0, 4.0], 10)),
        Criterion("ck-classification", "Классификация CK-lambda", lambda: _classification(120)),
        Criterion("gaussian-bound", "Гауссова оценка ядра", _gaussian_bound),
        Criterion("kernel-value", "Значение ядра mu_1(e) на T^2", _kernel_value),
        Criterion("differentiability", "Дифференцируемость в L^1/L^inf", _differentiability),
        Criterion("seminorm-closed-forms", "Полунормы в замкнутой форме", _seminorm_closed_forms(True)),
        Criterion("scale-comparison", "Сравнение шкал Lambda и L", _scale_comparison),
        Criterion("poisson-regularity", "Регулярность уравнения Пуассона", _poisson_regularity),
        Criterion("martingale-representation", "Мартингальное представление", _martingale(100_000, 20_000)),
        Criterion("finite-difference", "Порядок конечной разности", _finite_difference),
    ],
    "quick": [
        Criterion("spectral-exactness", "Точные тождества спектрального ядра", _exactness(10)),
        Criterion("riesz-bounds", "Оценки преобразований Рисса", _riesz([2.0], 2)),
        Criterion("ck-classification", "Классификация CK-lambda", lambda: _classification(40)),
        Criterion("kernel-value", "Значение ядра mu_1(e) на T^2", _kernel_value),
        Criterion("seminorm-closed-forms", "Полунормы в замкнутой форме", _seminorm_closed_forms(False)),
        Criterion("martingale-representation", "Мартингальное представление", _martingale(20_000, 5_000)),
    ],
}


def run_criterion(criterion: Criterion) -> Dict[str, Any]:
    """Запуск одного критерия; исключение делает критерий невыполненным"""
    started = time.monotonic()
    try:
        reports = criterion.build()
        error = None
    except Exception as e:
        logger.exception(f"Критерий {criterion.key} завершился ошибкой: {e}")
        reports, error = [], str(e)
    passed = error is None and all(report.passed for report in reports)
    slacks = [report.worst_slack for report in reports]
    entry = {
        "id": criterion.key,
        "title": criterion.title,
        "passed": passed,
        "worst_slack": min(slacks) if slacks else math.nan,
        "seconds": round(time.monotonic() - started, 3),
        "reports": [{"name": report.name, "tag": report.tag, "passed": report.passed,
                     "worst_slack": report.worst_slack, "witness": report.witness,
                     "constants": report.constants} for report in reports],
    }
    if error is not None:
        entry["error"] = error
    logger.info(f"Критерий {criterion.key}: {'выполнен' if passed else 'НЕ выполнен'} "
                f"за {entry['seconds']:.1f} с")
    return entry


def run_suite(name: str, output_dir: Optional[str] = None) -> Tuple[Dict[str, Any], int]:
    """
    Запуск набора критериев и запись итогового JSON

    Args:
        name: 'acceptance' или 'quick'
        output_dir: Каталог вывода (по умолчанию LAB_OUTPUT_DIR или results)

    Returns:
        Tuple[Dict[str, Any], int]: Итог и код завершения (0 - все критерии выполнены)

    Raises:
        ConfigError: Неизвестное имя набора
    """
    if name not in SUITES:
        raise ConfigError([f"Неизвестный набор: {name}. Допустимые значения: {', '.join(SUITES)}"])
    output_dir = output_dir or os.environ.get("LAB_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)
    logger.info(f"Набор {name}: {len(SUITES[name])} критериев")

    criteria = [run_criterion(criterion) for criterion in SUITES[name]]
    summary = to_serializable({
        "suite": name,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "passed": all(entry["passed"] for entry in criteria),
        "criteria": criteria,
    })

    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, SUITE_FILE.format(name=name))
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, ensure_ascii=False, indent=2)
        f.write("\n")
    logger.info(f"Итог набора записан в {path}")
    return summary, EXIT_OK if summary["passed"] else EXIT_FAILED
