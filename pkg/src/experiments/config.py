# src/experiments/config.py
"""
Конфигурация эксперимента: JSON-словарь версии схемы 1.

Флаги командной строки складываются в тот же словарь, поэтому файлы и флаги
проходят одну и ту же проверку validate_config.
"""
import copy
import hashlib
import json
import logging
import math
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..lipschitz.comparisons import lacunary_field
from ..spectral.fields import SpectralField
from ..spectral.lattice import FrequencyLattice
from ..spectral.random_fields import DecayProfile, random_field
from ..spectral.weights import VALID_KINDS as VALID_WEIGHT_KINDS
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Обязательные поля конфигурации
REQUIRED_FIELDS = ["schema_version", "kind", "weights"]

# Допустимые виды экспериментов
VALID_KINDS = [
    "classify",
    "kernel-bounds",
    "riesz-bounds",
    "gradient-bounds",
    "seminorm",
    "seminorm-compare",
    "poisson-regularity",
    "mc-riesz",
]

TOP_LEVEL_FIELDS = {
    "schema_version": int,
    "kind": str,
    "weights": str,
    "d": int,
    "bandwidth": int,
    "bandwidths": list,
    "seed": int,
    "output_dir": str,
    "xlsx": bool,
    "params": dict,
}

DEFAULT_D = 3
DEFAULT_BANDWIDTH = 8
DEFAULT_OUTPUT_DIR = "results"

VALID_FIELD_KINDS = ["cos", "sin", "random", "lacunary"]
VALID_SCALES = ["Lambda", "Lambda-eta", "L"]
VALID_TAIL_SCALES = ["Lp", "Lambda", "L"]
VALID_COMPARISONS = ["forward", "backward", "herz", "order-raising", "riesz", "fractional", "sweep"]
VALID_KERNEL_CHECKS = ["kernel-value", "analyticity", "differentiability", "ultracontractivity",
                       "contraction", "gaussian-bound", "finite-difference"]
VALID_RIESZ_OPERATORS = ["R1", "RG", "R1R1", "R1R2"]
VALID_MC_CHECKS = ["pairing", "second-order", "quadratic-variation", "subordination", "exit-time",
                   "hitting-law", "terminal-uniformity", "coordinate-variance"]

# Параметры видов экспериментов: имя -> значение по умолчанию (тип проверяется по нему)
PARAM_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "classify": {"lambdas": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], "tmin": 1e-6, "tpoints": 120},
    "kernel-bounds": {
        "checks": ["kernel-value", "analyticity", "differentiability", "gaussian-bound"],
        "ps": [1.25, 2.0, 4.0], "orders": [1, 2], "lam": 0.5, "tmin": 1e-4, "tmax": 10.0, "tpoints": 40,
        "trials": 10, "points": 200, "kernel_t": 1.0,
    },
    "riesz-bounds": {"ps": [1.25, 1.5, 2.0, 3.0, 4.0], "operators": ["R1", "RG", "R1R2"], "trials": 10},
    "gradient-bounds": {"ps": [1.0, 1.5, 2.0, 4.0, "inf"], "tmin": 1e-3, "tmax": 10.0, "tpoints": 24,
                        "trials": 5},
    "seminorm": {"field": "cos:1", "scale": "Lambda", "theta": 1.0, "order": 1, "eta": 1.0, "p": "inf"},
    "seminorm-compare": {"comparisons": ["forward", "backward", "herz"], "theta": 0.9, "lam": 0.1,
                         "p": 2.0, "count": 50, "backward_theta": 0.5, "thetas": [0.4, 0.8],
                         "ps": [2.0, "inf"]},
    "poisson-regularity": {"p": 2.0, "theta": 0.5, "lam": 0.1, "profile": "spectral:1.5", "count": 30,
                           "scales": ["Lp"]},
    "mc-riesz": {
        "checks": ["pairing", "exit-time"], "h": "sin:1", "f": "cos:1", "i": 1, "j": 1,
        "n_paths": 100_000, "dt": 1e-3, "y0": 3.0, "max_steps": 20_000, "y": 1.0, "t": 0.5,
        "per_path": False,
    },
}


class ConfigError(ValueError):
    """Ошибки конфигурации эксперимента (код завершения 2)"""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _is_number(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, float)):
        return True
    return isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity")


def to_float(value: Any) -> float:
    """Число из JSON: допускается строка 'inf' для p = inf"""
    if isinstance(value, str):
        return math.inf if value.strip().lower() in ("inf", "+inf", "infinity") else float(value)
    return float(value)


def _check_param(kind: str, name: str, value: Any, default: Any) -> List[str]:
    if isinstance(default, bool):
        return [] if isinstance(value, bool) else [f"Параметр {kind}.{name} должен быть логическим"]
    if isinstance(default, int):
        return [] if isinstance(value, int) and not isinstance(value, bool) else \
            [f"Параметр {kind}.{name} должен быть целым"]
    if isinstance(default, float) or (isinstance(default, str) and _is_number(default)):
        return [] if _is_number(value) else [f"Параметр {kind}.{name} должен быть числом"]
    if isinstance(default, list):
        if not isinstance(value, list) or not value:
            return [f"Параметр {kind}.{name} должен быть непустым списком"]
        if all(_is_number(v) for v in default) and not all(_is_number(v) for v in value):
            return [f"Параметр {kind}.{name} должен быть списком чисел"]
        return []
    if isinstance(default, str) and not isinstance(value, str):
        return [f"Параметр {kind}.{name} должен быть строкой"]
    return []


def _check_choices(kind: str, name: str, values: Any, valid: Sequence[str]) -> List[str]:
    values = values if isinstance(values, list) else [values]
    bad = [v for v in values if v not in valid]
    if bad:
        return [f"Некорректное значение {kind}.{name}: {', '.join(map(str, bad))}. "
                f"Допустимые значения: {', '.join(valid)}"]
    return []


def validate_field_spec(spec: str) -> List[str]:
    """Проверка описания поля: 'cos:<n1>,<n2>', 'sin:...', 'random:<seed>[:<profile>]', 'lacunary:<theta>'"""
    kind, _, body = str(spec).partition(":")
    if kind not in VALID_FIELD_KINDS:
        return [f"Некорректный тип поля: {kind}. Допустимые значения: {', '.join(VALID_FIELD_KINDS)}"]
    if not body:
        return [f"Пустые параметры в описании поля: '{spec}'"]
    try:
        if kind in ("cos", "sin"):
            [int(v) for v in body.split(",")]
        elif kind == "random":
            seed, _, profile = body.partition(":")
            int(seed)
            if profile:
                DecayProfile.parse(profile)
        else:
            float(body)
    except ValueError as e:
        return [f"Некорректное описание поля '{spec}': {e}"]
    return []


def validate_config(config: Dict[str, Any]) -> List[str]:
    """
    Валидация конфигурации эксперимента

    Args:
        config: Словарь конфигурации

    Returns:
        List[str]: Список ошибок (пустой, если ошибок нет)
    """
    if not isinstance(config, dict):
        return ["Конфигурация должна быть JSON-объектом"]
    errors = []

    # Проверяем обязательные поля
    for name in REQUIRED_FIELDS:
        if name not in config or config[name] in (None, ""):
            errors.append(f"Отсутствует обязательное поле: {name}")

    for name, value in config.items():
        if name not in TOP_LEVEL_FIELDS:
            errors.append(f"Неизвестное поле: {name}")
        elif not isinstance(value, TOP_LEVEL_FIELDS[name]) or \
                (TOP_LEVEL_FIELDS[name] is int and isinstance(value, bool)):
            errors.append(f"Поле {name} имеет некорректный тип: ожидался {TOP_LEVEL_FIELDS[name].__name__}")
    if errors:
        return errors

    if config["schema_version"] != SCHEMA_VERSION:
        errors.append(f"Неподдерживаемая версия схемы: {config['schema_version']} (ожидалась {SCHEMA_VERSION})")

    kind = config["kind"]
    if kind not in VALID_KINDS:
        errors.append(f"Некорректный вид эксперимента: {kind}. Допустимые значения: {', '.join(VALID_KINDS)}")
        return errors

    weight_kind = config["weights"].partition(":")[0].strip().lower()
    if weight_kind not in VALID_WEIGHT_KINDS:
        errors.append(f"Некорректный тип весов: {weight_kind}. Допустимые значения: {', '.join(VALID_WEIGHT_KINDS)}")
    if config.get("d", DEFAULT_D) < 1:
        errors.append(f"Размерность d должна быть >= 1, получено: {config.get('d')}")
    if config.get("bandwidth", DEFAULT_BANDWIDTH) < 1:
        errors.append(f"Полоса должна быть >= 1, получено: {config.get('bandwidth')}")
    if "bandwidths" in config:
        bands = config["bandwidths"]
        if not all(isinstance(b, int) and not isinstance(b, bool) and b >= 1 for b in bands):
            errors.append("Поле bandwidths должно быть списком целых >= 1")

    defaults = PARAM_DEFAULTS[kind]
    for name, value in config.get("params", {}).items():
        if name not in defaults:
            errors.append(f"Неизвестный параметр {kind}.{name}. Допустимые параметры: {', '.join(defaults)}")
            continue
        errors.extend(_check_param(kind, name, value, defaults[name]))
    if errors:
        return errors

    params = resolved_params(config)
    if kind == "kernel-bounds":
        errors.extend(_check_choices(kind, "checks", params["checks"], VALID_KERNEL_CHECKS))
    elif kind == "riesz-bounds":
        errors.extend(_check_choices(kind, "operators", params["operators"], VALID_RIESZ_OPERATORS))
    elif kind == "seminorm":
        errors.extend(_check_choices(kind, "scale", params["scale"], VALID_SCALES))
        errors.extend(validate_field_spec(params["field"]))
    elif kind == "seminorm-compare":
        errors.extend(_check_choices(kind, "comparisons", params["comparisons"], VALID_COMPARISONS))
    elif kind == "poisson-regularity":
        errors.extend(_check_choices(kind, "scales", params["scales"], VALID_TAIL_SCALES))
    elif kind == "mc-riesz":
        errors.extend(_check_choices(kind, "checks", params["checks"], VALID_MC_CHECKS))
        errors.extend(validate_field_spec(params["h"]))
        errors.extend(validate_field_spec(params["f"]))
        if params["n_paths"] < 2:
            errors.append(f"Параметр mc-riesz.n_paths должен быть >= 2, получено: {params['n_paths']}")
    if not errors:
        errors.extend(check_param_ranges(kind, params))
    return errors


def _check_time_grid(kind: str, params: Dict[str, Any], errors: List[str]):
    tmin, tmax = to_float(params["tmin"]), to_float(params.get("tmax", 1.0))
    if not 0 < tmin < tmax:
        errors.append(f"Параметры {kind}.tmin, {kind}.tmax: требуется 0 < tmin < tmax, получено: {tmin}, {tmax}")
    if params["tpoints"] < 2:
        errors.append(f"Параметр {kind}.tpoints должен быть >= 2, получено: {params['tpoints']}")


def _check_exponents(kind: str, name: str, ps: Sequence[float], interior: bool, errors: List[str]):
    if interior:
        bad = [p for p in ps if not 1 < p < math.inf]
        if bad:
            errors.append(f"Параметр {kind}.{name}: требуется 1 < p < inf, получено: {bad}")
    else:
        bad = [p for p in ps if not p >= 1]
        if bad:
            errors.append(f"Параметр {kind}.{name}: требуется p >= 1, получено: {bad}")


def check_param_ranges(kind: str, params: Dict[str, Any]) -> List[str]:
    """
    Ограничения параметров вида эксперимента, не зависящие от весовой модели

    Args:
        kind: Вид эксперимента
        params: Параметры с подставленными значениями по умолчанию

    Returns:
        List[str]: Список ошибок (пустой, если ошибок нет)
    """
    errors: List[str] = []
    if kind == "classify":
        lambdas = [to_float(v) for v in params["lambdas"]]
        if not all(0 < lam < 1 for lam in lambdas):
            errors.append(f"Параметр classify.lambdas: требуется 0 < lambda < 1, получено: {lambdas}")
        _check_time_grid(kind, params, errors)

    elif kind == "kernel-bounds":
        checks = params["checks"]
        _check_time_grid(kind, params, errors)
        _check_exponents(kind, "ps", [to_float(p) for p in params["ps"]], "analyticity" in checks, errors)
        if not all(isinstance(n, int) and n >= 1 for n in params["orders"]):
            errors.append(f"Параметр kernel-bounds.orders должен содержать целые >= 1, получено: {params['orders']}")
        if "gaussian-bound" in checks and not 0 < to_float(params["lam"]) < 1:
            errors.append(f"Параметр kernel-bounds.lam должен лежать в (0, 1), получено: {params['lam']}")
        if "kernel-value" in checks and not to_float(params["kernel_t"]) > 0:
            errors.append(f"Параметр kernel-bounds.kernel_t должен быть > 0, получено: {params['kernel_t']}")
        if params["points"] < 1 or params["trials"] < 0:
            errors.append(f"Параметры kernel-bounds: требуется points >= 1 и trials >= 0, "
                          f"получено: {params['points']}, {params['trials']}")

    elif kind == "riesz-bounds":
        _check_exponents(kind, "ps", [to_float(p) for p in params["ps"]], True, errors)
        if params["trials"] < 0:
            errors.append(f"Параметр riesz-bounds.trials должен быть >= 0, получено: {params['trials']}")

    elif kind == "gradient-bounds":
        _check_time_grid(kind, params, errors)
        _check_exponents(kind, "ps", [to_float(p) for p in params["ps"]], False, errors)
        if params["trials"] < 0:
            errors.append(f"Параметр gradient-bounds.trials должен быть >= 0, получено: {params['trials']}")

    elif kind == "seminorm":
        theta, p, order = to_float(params["theta"]), to_float(params["p"]), params["order"]
        _check_exponents(kind, "p", [p], False, errors)
        if params["scale"] == "Lambda" and not (order >= 1 and 0 < theta < 2 * order):
            errors.append(f"Шкала Lambda требует 0 < theta < 2n, получено: theta={theta}, n={order}")
        elif params["scale"] == "Lambda-eta" and not 0 < theta <= 2 * to_float(params["eta"]):
            errors.append(f"Шкала Lambda-eta требует 0 < theta <= 2 eta, получено: theta={theta}, eta={params['eta']}")
        elif params["scale"] == "L" and not (order >= 1 and 0 < theta <= order):
            errors.append(f"Шкала L требует 0 < theta <= k, получено: theta={theta}, k={order}")

    elif kind == "seminorm-compare":
        errors.extend(_check_comparisons(params))

    elif kind == "poisson-regularity":
        theta, lam, p = to_float(params["theta"]), to_float(params["lam"]), to_float(params["p"])
        try:
            DecayProfile.parse(params["profile"])
        except ValueError as e:
            errors.append(f"Параметр poisson-regularity.profile: {e}")
        _check_exponents(kind, "p", [p], False, errors)
        if params["count"] < 1:
            errors.append(f"Параметр poisson-regularity.count должен быть >= 1, получено: {params['count']}")
        if not theta > 0:
            errors.append(f"Параметр poisson-regularity.theta должен быть > 0, получено: {theta}")
        elif (p == 1 or math.isinf(p)) and not (theta < 1 and 0 < lam < theta / 2.0):
            errors.append(f"При p={p} требуется 0 < theta < 1 и 0 < lam < theta/2, получено: theta={theta}, lam={lam}")

    elif kind == "mc-riesz":
        checks = params["checks"]
        if not to_float(params["dt"]) > 0 or not to_float(params["y0"]) > 0:
            errors.append(f"Параметры mc-riesz.dt и mc-riesz.y0 должны быть > 0, "
                          f"получено: {params['dt']}, {params['y0']}")
        if params["max_steps"] < 1:
            errors.append(f"Параметр mc-riesz.max_steps должен быть >= 1, получено: {params['max_steps']}")
        if params["i"] < 1 or params["j"] < 1:
            errors.append(f"Индексы направлений mc-riesz.i, mc-riesz.j должны быть >= 1, "
                          f"получено: {params['i']}, {params['j']}")
        if "subordination" in checks and not to_float(params["y"]) >= 0:
            errors.append(f"Параметр mc-riesz.y должен быть >= 0, получено: {params['y']}")
        if "coordinate-variance" in checks and not to_float(params["t"]) > 0:
            errors.append(f"Параметр mc-riesz.t должен быть > 0, получено: {params['t']}")
    return errors


def _check_comparisons(params: Dict[str, Any]) -> List[str]:
    errors: List[str] = []
    comparisons = params["comparisons"]
    theta, lam, p = to_float(params["theta"]), to_float(params["lam"]), to_float(params["p"])
    backward_theta = to_float(params["backward_theta"])
    endpoint = p == 1 or math.isinf(p)
    _check_exponents("seminorm-compare", "p", [p], bool({"order-raising", "riesz"} & set(comparisons)), errors)
    if params["count"] < 1:
        errors.append(f"Параметр seminorm-compare.count должен быть >= 1, получено: {params['count']}")
    if not theta > 0 or not backward_theta > 0:
        errors.append(f"Параметры seminorm-compare.theta и backward_theta должны быть > 0, "
                      f"получено: {theta}, {backward_theta}")
        return errors
    if "forward" in comparisons:
        beta = (1.0 - lam) * theta - 2.0 * lam
        if not (theta < 2 and 0 < lam < 1 and beta > 0):
            errors.append(f"Сравнение forward требует 0 < theta < 2, 0 < lam < 1 и (1-lam)theta - 2lam > 0, "
                          f"получено: theta={theta}, lam={lam}")
    if {"backward", "herz"} & set(comparisons) and not backward_theta < 1:
        errors.append(f"Сравнения backward и herz требуют 0 < backward_theta < 1, получено: {backward_theta}")
    if "backward" in comparisons and endpoint and not 0 < lam < 1:
        errors.append(f"Сравнение backward при p={p} требует 0 < lam < 1, получено: {lam}")
    # младший порядок эквивалентности eta = 1
    if "fractional" in comparisons and not theta <= 2:
        errors.append(f"Сравнение fractional требует 0 < theta <= 2, получено: {theta}")
    if "sweep" in comparisons:
        thetas = [to_float(v) for v in params["thetas"]]
        if not all(t > 0 for t in thetas):
            errors.append(f"Параметр seminorm-compare.thetas должен содержать значения > 0, получено: {thetas}")
        _check_exponents("seminorm-compare", "ps", [to_float(v) for v in params["ps"]], False, errors)
    return errors


def check_model_constraints(config: Dict[str, Any], w: WeightModel, lattice: FrequencyLattice) -> List[str]:
    """Ограничения, зависящие от весовой модели и решётки: размерность, диагональность, поля"""
    kind, params = config["kind"], config["params"]
    errors: List[str] = []
    kernel_at_identity = kind == "classify" or (
        kind == "kernel-bounds" and {"kernel-value", "gaussian-bound"} & set(params["checks"]))
    if kernel_at_identity and not w.is_diagonal:
        errors.append(f"Вид {kind} с этими проверками требует диагональные веса, получено: {w.spec}")
    if kind == "riesz-bounds" and "R1R2" in params["operators"] and w.dimension < 2:
        errors.append(f"Оператор R1R2 требует d >= 2, получено: {w.dimension}")

    specs: List[Tuple[str, str]] = []
    if kind == "seminorm":
        specs.append(("field", params["field"]))
    elif kind == "mc-riesz":
        for name in ("i", "j"):
            if params[name] > w.dimension:
                errors.append(f"Индекс направления mc-riesz.{name}={params[name]} вне диапазона 1..{w.dimension}")
        if {"pairing", "second-order", "quadratic-variation", "subordination"} & set(params["checks"]):
            specs += [("h", params["h"]), ("f", params["f"])]
    for name, spec in specs:
        try:
            f = build_field(spec, lattice, w)
        except ValueError as e:
            errors.append(f"Поле {kind}.{name} = '{spec}' не строится на решётке {lattice.bandwidths}: {e}")
            continue
        if kind == "mc-riesz" and not f.is_mean_zero():
            errors.append(f"Поле mc-riesz.{name} = '{spec}' должно иметь нулевое среднее")
    return errors


def resolved_params(config: Dict[str, Any]) -> Dict[str, Any]:
    """Параметры вида эксперимента с подставленными значениями по умолчанию"""
    params = copy.deepcopy(PARAM_DEFAULTS[config["kind"]])
    params.update(config.get("params", {}))
    return params


def resolve_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Проверка и разрешение конфигурации: все значения по умолчанию явно подставлены

    Raises:
        ConfigError: При ошибках валидации
    """
    errors = validate_config(config)
    if errors:
        raise ConfigError(errors)
    resolved = {
        "schema_version": SCHEMA_VERSION,
        "kind": config["kind"],
        "weights": config["weights"],
        "d": config.get("d", DEFAULT_D),
        "bandwidth": config.get("bandwidth", DEFAULT_BANDWIDTH),
        "seed": config.get("seed", 0),
        "output_dir": config.get("output_dir") or os.environ.get("LAB_OUTPUT_DIR", DEFAULT_OUTPUT_DIR),
        "xlsx": config.get("xlsx", False),
        "params": resolved_params(config),
    }
    if "bandwidths" in config:
        resolved["bandwidths"] = list(config["bandwidths"])
    try:
        model = build_weights(resolved)
        lattice = build_lattice(resolved, model)
    except ValueError as e:
        raise ConfigError([str(e)]) from e
    errors = check_model_constraints(resolved, model, lattice)
    if errors:
        raise ConfigError(errors)
    return resolved


def load_config(path: str) -> Dict[str, Any]:
    """Чтение конфигурации из JSON-файла"""
    if not os.path.exists(path):
        raise ConfigError([f"Файл не найден: {path}"])
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError([f"Некорректный JSON в {path}: {e}"]) from e


def config_hash(config: Dict[str, Any]) -> str:
    """Хэш разрешённой конфигурации без каталога вывода"""
    payload = {k: v for k, v in config.items() if k != "output_dir"}
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def build_weights(config: Dict[str, Any]) -> WeightModel:
    return WeightModel.from_spec(config["weights"], config.get("d", DEFAULT_D))


def build_lattice(config: Dict[str, Any], w: WeightModel) -> FrequencyLattice:
    return FrequencyLattice.for_weights(w, config.get("bandwidth", DEFAULT_BANDWIDTH), config.get("bandwidths"))


def parse_frequency(body: str, d: int) -> Tuple[int, ...]:
    values = [int(v) for v in body.split(",")]
    if len(values) > d:
        raise ValueError(f"Частота {values} длиннее размерности {d}")
    return tuple(values + [0] * (d - len(values)))


def build_field(spec: str, lattice: FrequencyLattice, w: Optional[WeightModel] = None) -> SpectralField:
    """
    Поле по описанию

    Args:
        spec: 'cos:<n>', 'sin:<n>' (недостающие координаты частоты - нули),
            'random:<seed>[:<profile>]' (по умолчанию polynomial:1.5), 'lacunary:<theta>'
        lattice: Решётка частот
        w: Весовая модель (для профиля spectral)

    Returns:
        SpectralField: Вещественное поле
    """
    errors = validate_field_spec(spec)
    if errors:
        raise ValueError(errors[0])
    kind, _, body = spec.partition(":")
    if kind == "cos":
        return SpectralField.cosine(lattice, parse_frequency(body, lattice.d))
    if kind == "sin":
        return SpectralField.sine(lattice, parse_frequency(body, lattice.d))
    if kind == "random":
        seed, _, profile = body.partition(":")
        return random_field(lattice, int(seed), DecayProfile.parse(profile or "polynomial:1.5"), weights=w)
    return lacunary_field(lattice, float(body))
