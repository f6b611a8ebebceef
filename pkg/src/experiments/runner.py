# src/experiments/runner.py
"""
Запуск эксперимента по разрешённой конфигурации.

Каждый вид эксперимента - функция RunContext -> список отчётов.
Параметры проверяются заранее в resolve_config (ConfigError, код 2);
исключение во время вычислений даёт код завершения 1.
"""
import logging
import math
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import pandas as pd

from ..geometry.bounds import verify_gaussian_bound
from ..geometry.sampler import point_sample
from ..lipschitz.comparisons import (
    check_fractional_equivalence,
    check_herz,
    check_order_raising,
    check_riesz_lipschitz,
    comparison_family,
    compare_scales_backward,
    compare_scales_forward,
    seminorm_sweep,
    seminorm_table,
)
from ..lipschitz.seminorms import (
    canonical_lambda_order,
    dist_seminorm,
    lambda_seminorm,
    lambda_seminorm_fractional,
)
from ..poisson.gradient_bounds import gradient_bound_check
from ..poisson.regularity import (
    lipschitz_regularity_report,
    regularity_family_check,
    sobolev_report,
    tail_convergence,
)
from ..poisson.solver import solve_poisson
from ..riesz.bounds import estimate_operator_ratio
from ..riesz.transforms import RieszSymbol, RieszVector
from ..semigroup.checks import (
    check_analyticity,
    check_contraction,
    check_kernel_value,
    check_L1_Linf_differentiability,
    check_ultracontractivity,
    finite_difference_order,
)
from ..semigroup.diagnostics import classify_CK
from ..spectral.dictionary import trial_dictionary
from ..spectral.lattice import FrequencyLattice
from ..spectral.random_fields import DecayProfile, random_field
from ..spectral.weights import WeightModel
from ..stochastic.checks import (
    coordinate_variance_check,
    exit_time_check,
    hitting_law_check,
    mc_riesz_pairing,
    mc_second_order_pairing,
    quadratic_variation_check,
    subordination_check,
    terminal_uniformity_check,
)
from ..stochastic.paths import PathConfig
from ..utils.numeric import log_grid
from ..utils.report import ExperimentReport
from .config import (
    build_field,
    build_lattice,
    build_weights,
    config_hash,
    resolve_config,
    to_float,
)
from .reports import write_outputs

logger = logging.getLogger(__name__)

# Наблюдаемый порядок центральной разности не ниже этого значения
FINITE_DIFFERENCE_MIN_ORDER = 1.9
FINITE_DIFFERENCE_TIME = 0.5
FINITE_DIFFERENCE_PROFILE = DecayProfile("polynomial", 1.5)
CONTRACTION_PS = [1.0, 2.0, 4.0, math.inf]
PER_PATH_FILE = "paths_{label}.tsv"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class RunContext:
    """Объекты, общие для всех проверок запуска"""

    config: Dict[str, Any]
    weights: WeightModel
    lattice: FrequencyLattice
    output_dir: str

    @property
    def params(self) -> Dict[str, Any]:
        return self.config["params"]

    @property
    def seed(self) -> int:
        return self.config["seed"]

    def field(self, spec: str):
        return build_field(spec, self.lattice, self.weights)

    def trials(self, count: int):
        return trial_dictionary(self.lattice, self.seed, random_per_profile=count)


@dataclass
class RunResult:
    reports: List[ExperimentReport]
    exit_code: int
    config: Dict[str, Any]
    config_hash: str
    written: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.exit_code == EXIT_OK


def _floats(values) -> List[float]:
    return [to_float(v) for v in values]


def run_classify(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    t_grid = log_grid(to_float(params["tmin"]), 1.0, params["tpoints"])
    return [classify_CK(ctx.weights, _floats(params["lambdas"]), t_grid).to_report()]


def _finite_difference_report(ctx: RunContext, count: int) -> ExperimentReport:
    report = ExperimentReport(name="finite-difference", tag="heat-semigroup")
    rows = []
    for k in range(count):
        f = random_field(ctx.lattice, ctx.seed + k, FINITE_DIFFERENCE_PROFILE, weights=ctx.weights)
        order = finite_difference_order(f, FINITE_DIFFERENCE_TIME, ctx.weights)
        report.record(order - FINITE_DIFFERENCE_MIN_ORDER, {"field": k, "order": order})
        rows.append({"field": k, "t": FINITE_DIFFERENCE_TIME, "order": order})
    report.tables["finite_difference"] = pd.DataFrame(rows)
    report.constants["min_order"] = float(min(row["order"] for row in rows)) if rows else math.nan
    return report


def run_kernel_bounds(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    w = ctx.weights
    checks = params["checks"]
    ps = _floats(params["ps"])
    orders = [int(n) for n in params["orders"]]
    t_grid = log_grid(to_float(params["tmin"]), to_float(params["tmax"]), params["tpoints"])
    trials = ctx.trials(params["trials"]) if set(checks) - {"kernel-value", "gaussian-bound"} else []

    reports = []
    for check in checks:
        logger.info(f"Проверка {check}")
        if check == "kernel-value":
            reports.append(check_kernel_value(w, to_float(params["kernel_t"])))
        elif check == "analyticity":
            reports.append(check_analyticity(w, ps, trials, t_grid, orders))
        elif check == "differentiability":
            reports.append(check_L1_Linf_differentiability(w, ctx.lattice, trials, t_grid, orders))
        elif check == "ultracontractivity":
            finite = [p for p in ps if math.isfinite(p)]
            reports.append(check_ultracontractivity(w, finite or [1.0], trials, t_grid))
        elif check == "contraction":
            reports.append(check_contraction(w, CONTRACTION_PS, trials, t_grid))
        elif check == "gaussian-bound":
            short = t_grid[t_grid <= 1.0]
            points = point_sample(w.dimension, params["points"], ctx.seed)
            reports.append(verify_gaussian_bound(w, to_float(params["lam"]), short, points))
        elif check == "finite-difference":
            reports.append(_finite_difference_report(ctx, params["trials"]))
    return reports


def _riesz_operator(name: str, w: WeightModel):
    if name == "R1":
        return RieszSymbol(1, (1,), w)
    if name == "RG":
        return RieszVector(w)
    if name == "R1R1":
        return RieszSymbol(2, (1, 1), w)
    if w.dimension < 2:
        raise ValueError(f"Оператор {name} требует d >= 2, получено: {w.dimension}")
    return RieszSymbol(2, (1, 2), w)


def run_riesz_bounds(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    trials = ctx.trials(params["trials"])
    operators = [_riesz_operator(name, ctx.weights) for name in params["operators"]]
    return [estimate_operator_ratio(op, p, trials) for p in _floats(params["ps"]) for op in operators]


def run_gradient_bounds(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    t_grid = log_grid(to_float(params["tmin"]), to_float(params["tmax"]), params["tpoints"])
    return [gradient_bound_check(ctx.weights, ctx.trials(params["trials"]), t_grid, _floats(params["ps"]))]


def run_seminorm(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    f = ctx.field(params["field"])
    theta, p, scale = to_float(params["theta"]), to_float(params["p"]), params["scale"]
    if scale == "Lambda":
        result = lambda_seminorm(f, theta, params["order"], p, ctx.weights)
    elif scale == "Lambda-eta":
        result = lambda_seminorm_fractional(f, theta, to_float(params["eta"]), p, ctx.weights)
    else:
        result = dist_seminorm(f, theta, params["order"], p, ctx.weights)

    report = ExperimentReport(name=f"seminorm[{scale}]", tag="lipschitz-seminorm")
    report.constants.update({"value": result.value, "scale": scale, "theta": theta, "order": result.order,
                             "p": p, "refinement_delta": result.refinement_delta,
                             "boundary_attained": result.boundary_attained})
    report.tables["seminorms"] = seminorm_table([(params["field"], result)])
    if result.boundary_attained:
        report.notes.append("Супремум достигнут на границе сетки")
    logger.info(f"{scale}_{theta:g}({params['field']}) = {result.value:.8g}")
    return [report]


def run_seminorm_compare(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    w = ctx.weights
    theta, lam, p = to_float(params["theta"]), to_float(params["lam"]), to_float(params["p"])
    backward_theta = to_float(params["backward_theta"])
    family = comparison_family(ctx.lattice, theta, params["count"], ctx.seed)
    backward_family = comparison_family(ctx.lattice, backward_theta, params["count"], ctx.seed)
    endpoint = p == 1 or math.isinf(p)

    reports = []
    for comparison in params["comparisons"]:
        logger.info(f"Сравнение {comparison}")
        if comparison == "forward":
            reports.append(compare_scales_forward(family, theta, lam, p, w))
        elif comparison == "backward":
            reports.append(compare_scales_backward(backward_family, backward_theta, p, w,
                                                   lam=lam if endpoint else None))
        elif comparison == "herz":
            reports.append(check_herz(backward_family, backward_theta, p, w, k=1))
        elif comparison == "order-raising":
            reports.append(check_order_raising(family, theta, canonical_lambda_order(theta), p, w))
        elif comparison == "riesz":
            reports.append(check_riesz_lipschitz(family, theta, p, w))
        elif comparison == "fractional":
            reports.append(check_fractional_equivalence(family, theta, p, w))
        elif comparison == "sweep":
            reports.append(seminorm_sweep(family, _floats(params["thetas"]), _floats(params["ps"]), w))
    return reports


def run_poisson_regularity(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    w = ctx.weights
    theta, lam, p = to_float(params["theta"]), to_float(params["lam"]), to_float(params["p"])
    profile = DecayProfile.parse(params["profile"])
    fields = [random_field(ctx.lattice, ctx.seed + k, profile, weights=w) for k in range(params["count"])]
    u = solve_poisson(fields[0], w)
    interior = 1 < p < math.inf

    reports = []
    if interior:
        reports.append(sobolev_report(u, p, w))
    for scale in params["scales"]:
        reports.append(tail_convergence(u, p, w, scale, theta if scale != "Lp" else None))
    reports.append(lipschitz_regularity_report(fields[0], theta, p, w, lam=lam, seed=ctx.seed))
    if interior:
        reports.append(regularity_family_check(fields, theta, p, w))
    return reports


def run_mc_riesz(ctx: RunContext) -> List[ExperimentReport]:
    params = ctx.params
    w = ctx.weights
    cfg = PathConfig(dt=to_float(params["dt"]), y0=to_float(params["y0"]), n_paths=params["n_paths"],
                     seed=ctx.seed, max_steps=params["max_steps"])
    checks = params["checks"]
    needs_fields = {"pairing", "second-order", "quadratic-variation", "subordination"} & set(checks)
    h = ctx.field(params["h"]) if needs_fields else None
    f = ctx.field(params["f"]) if needs_fields else None

    def per_path(label: str):
        if not params["per_path"]:
            return None
        os.makedirs(ctx.output_dir, exist_ok=True)
        return os.path.join(ctx.output_dir, PER_PATH_FILE.format(label=label))

    reports = []
    for check in checks:
        logger.info(f"Проверка {check}: {cfg.n_paths} путей, dt={cfg.dt}, y0={cfg.y0}")
        if check == "pairing":
            estimate = mc_riesz_pairing(h, f, params["i"], cfg, w, output=per_path("pairing"))
            reports.append(estimate.to_report())
        elif check == "second-order":
            estimate = mc_second_order_pairing(h, f, params["i"], params["j"], cfg, w,
                                               output=per_path("second_order"))
            reports.append(estimate.to_report())
        elif check == "quadratic-variation":
            reports.append(quadratic_variation_check(f, cfg, w))
        elif check == "subordination":
            reports.append(subordination_check(f, to_float(params["y"]), cfg, w))
        elif check == "exit-time":
            reports.append(exit_time_check(cfg))
        elif check == "hitting-law":
            reports.append(hitting_law_check(cfg))
        elif check == "terminal-uniformity":
            reports.append(terminal_uniformity_check(cfg, w))
        elif check == "coordinate-variance":
            reports.append(coordinate_variance_check(cfg, w, to_float(params["t"])))
    return reports


RUNNERS: Dict[str, Callable[[RunContext], List[ExperimentReport]]] = {
    "classify": run_classify,
    "kernel-bounds": run_kernel_bounds,
    "riesz-bounds": run_riesz_bounds,
    "gradient-bounds": run_gradient_bounds,
    "seminorm": run_seminorm,
    "seminorm-compare": run_seminorm_compare,
    "poisson-regularity": run_poisson_regularity,
    "mc-riesz": run_mc_riesz,
}


def build_reports(config: Dict[str, Any], output_dir: str) -> List[ExperimentReport]:
    """
    Отчёты эксперимента без записи файлов

    Args:
        config: Разрешённая конфигурация
        output_dir: Каталог для данных по путям

    Returns:
        List[ExperimentReport]: Отчёты в порядке проверок

    Raises:
        ValueError: Ошибка во время вычислений (параметры проверены в resolve_config)
    """
    w = build_weights(config)
    ctx = RunContext(config, w, build_lattice(config, w), output_dir)
    return RUNNERS[config["kind"]](ctx)


def run_config(config: Dict[str, Any], write: bool = True) -> RunResult:
    """
    Проверка, выполнение и запись эксперимента

    Args:
        config: Конфигурация (файл или сложенные флаги)
        write: Записывать report.json и таблицы

    Returns:
        RunResult: Отчёты, код завершения (0 - всё выполнено, 1 - есть нарушения) и записанные файлы

    Raises:
        ConfigError: При ошибках конфигурации (код завершения 2)
    """
    resolved = resolve_config(config)
    digest = config_hash(resolved)
    output_dir = resolved["output_dir"]
    logger.info(f"Эксперимент {resolved['kind']}: веса {resolved['weights']}, d={resolved['d']}, "
                f"seed={resolved['seed']}, config_hash={digest}")

    started = time.monotonic()
    reports = build_reports(resolved, output_dir)
    elapsed = time.monotonic() - started

    resolution = list(build_lattice(resolved, build_weights(resolved)).bandwidths)
    for report in reports:
        report.provenance.update({"kind": resolved["kind"], "seed": resolved["seed"],
                                  "bandwidths": resolution, "config_hash": digest})

    exit_code = EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED
    result = RunResult(reports, exit_code, resolved, digest)
    if write:
        result.written = write_outputs(reports, resolved, digest, output_dir, resolved["xlsx"])

    failed = [report.name for report in reports if not report.passed]
    if failed:
        logger.warning(f"Нарушены проверки: {', '.join(failed)}")
    logger.info(f"Выполнено отчётов: {len(reports)} за {elapsed:.1f} с")
    return result
