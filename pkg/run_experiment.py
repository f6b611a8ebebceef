#!/usr/bin/env python
# run_experiment.py
"""
Запуск одного эксперимента: подкоманда с флагами или конфигурация из JSON-файла.

Флаги складываются в словарь конфигурации и проверяются так же, как файл.
Коды завершения: 0 - все проверки выполнены, 1 - есть нарушения или ошибка выполнения,
2 - некорректная конфигурация.
"""
import os
import sys
import argparse
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from loguru import logger

# Добавляем текущую директорию в путь для импортов
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

# Импортируем модули проекта
from src.utils.logger import setup_logger, add_logging_args
from src.experiments.config import SCHEMA_VERSION, VALID_KINDS, ConfigError, load_config
from src.experiments.runner import EXIT_CONFIG_ERROR, EXIT_FAILED, run_config

# Веса по умолчанию для запуска флагами: a_i = i^2
DEFAULT_WEIGHTS = 'power:0.5'


def number_list(text: str) -> List[float]:
    """'1.25,2,inf' -> [1.25, 2.0, inf]"""
    return [float(v) for v in text.split(',') if v.strip()]


def int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(',') if v.strip()]


def str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(',') if v.strip()]


# Флаги видов экспериментов: (флаг, имя параметра, тип, описание)
KIND_FLAGS = {
    'classify': [
        ('--lambdas', 'lambdas', number_list, 'Проверяемые lambda через запятую'),
        ('--tmin', 'tmin', float, 'Нижний конец сетки t'),
        ('--tpoints', 'tpoints', int, 'Число точек сетки t'),
    ],
    'kernel-bounds': [
        ('--checks', 'checks', str_list, 'Проверки: kernel-value, analyticity, differentiability, '
                                         'ultracontractivity, contraction, gaussian-bound, finite-difference'),
        ('--p', 'ps', number_list, 'Показатели p через запятую'),
        ('--orders', 'orders', int_list, 'Порядки производных'),
        ('--lam', 'lam', float, 'Показатель lambda гауссовой оценки'),
        ('--tmin', 'tmin', float, 'Нижний конец сетки t'),
        ('--tmax', 'tmax', float, 'Верхний конец сетки t'),
        ('--tpoints', 'tpoints', int, 'Число точек сетки t'),
        ('--trials', 'trials', int, 'Случайных полей на профиль словаря'),
        ('--points', 'points', int, 'Число точек выборки для гауссовой оценки'),
        ('--kernel-t', 'kernel_t', float, 'Время t для значения mu_t(e)'),
    ],
    'riesz-bounds': [
        ('--p', 'ps', number_list, 'Показатели p через запятую'),
        ('--operators', 'operators', str_list, 'Операторы: R1, RG, R1R1, R1R2'),
        ('--trials', 'trials', int, 'Случайных полей на профиль словаря'),
    ],
    'gradient-bounds': [
        ('--p', 'ps', number_list, 'Показатели p через запятую (inf допустим)'),
        ('--tmin', 'tmin', float, 'Нижний конец сетки t'),
        ('--tmax', 'tmax', float, 'Верхний конец сетки t'),
        ('--tpoints', 'tpoints', int, 'Число точек сетки t'),
        ('--trials', 'trials', int, 'Случайных полей на профиль словаря'),
    ],
    'seminorm': [
        ('--field', 'field', str, "Поле: 'cos:<n>', 'sin:<n>', 'random:<seed>[:<profile>]', 'lacunary:<theta>'"),
        ('--scale', 'scale', str, 'Шкала: Lambda, Lambda-eta, L'),
        ('--theta', 'theta', float, 'Показатель theta'),
        ('--order', 'order', int, 'Порядок n (Lambda) или k (L)'),
        ('--eta', 'eta', float, 'Дробный порядок eta (Lambda-eta)'),
        ('--p', 'p', float, 'Показатель p (inf допустим)'),
    ],
    'seminorm-compare': [
        ('--comparisons', 'comparisons', str_list, 'Сравнения: forward, backward, herz, order-raising, '
                                                   'riesz, fractional, sweep'),
        ('--theta', 'theta', float, 'Показатель theta'),
        ('--lam', 'lam', float, 'Показатель lambda'),
        ('--p', 'p', float, 'Показатель p'),
        ('--count', 'count', int, 'Размер семейства полей'),
        ('--backward-theta', 'backward_theta', float, 'theta для сравнения Lambda -> L и оценок Герца'),
        ('--thetas', 'thetas', number_list, 'Сетка theta для развёртки'),
        ('--ps', 'ps', number_list, 'Сетка p для развёртки'),
    ],
    'poisson-regularity': [
        ('--p', 'p', float, 'Показатель p'),
        ('--theta', 'theta', float, 'Показатель theta'),
        ('--lam', 'lam', float, 'Показатель lambda'),
        ('--profile', 'profile', str, 'Профиль убывания правой части'),
        ('--count', 'count', int, 'Число правых частей'),
        ('--scales', 'scales', str_list, 'Шкалы хвостовой кривой: Lp, Lambda, L'),
    ],
    'mc-riesz': [
        ('--checks', 'checks', str_list, 'Проверки: pairing, second-order, quadratic-variation, subordination, '
                                         'exit-time, hitting-law, terminal-uniformity, coordinate-variance'),
        ('--h', 'h', str, 'Поле h'),
        ('--f', 'f', str, 'Поле f'),
        ('--i', 'i', int, 'Направление i'),
        ('--j', 'j', int, 'Направление j (второй порядок)'),
        ('--paths', 'n_paths', int, 'Число путей'),
        ('--dt', 'dt', float, 'Шаг по времени'),
        ('--y0', 'y0', float, 'Начальная высота'),
        ('--max-steps', 'max_steps', int, 'Предел числа шагов'),
        ('--y', 'y', float, 'Высота для проверки подчинения'),
        ('--t', 't', float, 'Время для ковариации координат'),
    ],
}


def parse_args(argv: Optional[Sequence[str]] = None):
    """Парсинг аргументов командной строки"""
    parser = argparse.ArgumentParser(
        description='Запуск эксперимента с тепловой полугруппой на торе',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument('--config', help='JSON-файл конфигурации (флаги подкоманды его перекрывают)')
    parser = add_logging_args(parser)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--weights', help=f"Веса: 'power:<lam>', 'geometric:<sigma>', 'explicit:<a1>,...', "
                                          f"'matrix:<row>;<row>' (для флагов по умолчанию {DEFAULT_WEIGHTS})")
    common.add_argument('--d', type=int, help='Размерность тора')
    common.add_argument('--bandwidth', type=int, help='Полоса B_1 по первой оси')
    common.add_argument('--bandwidths', type=int_list, help='Явные полосы B_i через запятую')
    common.add_argument('--seed', type=int, help='Зерно')
    common.add_argument('--output-dir', help='Каталог вывода (по умолчанию LAB_OUTPUT_DIR или results)')
    common.add_argument('--xlsx', action='store_true', default=None, help='Записать tables.xlsx')

    subparsers = parser.add_subparsers(dest='kind', metavar='KIND')
    for kind in VALID_KINDS:
        sub = subparsers.add_parser(kind, parents=[common], help=f'Эксперимент {kind}',
                                    formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        for flag, dest, kind_type, text in KIND_FLAGS[kind]:
            sub.add_argument(flag, dest=dest, type=kind_type, help=text)
        if kind == 'mc-riesz':
            sub.add_argument('--per-path', dest='per_path', action='store_true', default=None,
                             help='Записать данные по путям в TSV')
    return parser.parse_args(argv)


def config_from_args(args) -> Dict[str, Any]:
    """
    Словарь конфигурации из файла и флагов

    Args:
        args: Разобранные аргументы

    Returns:
        Dict[str, Any]: Конфигурация до валидации

    Raises:
        ConfigError: Если не задан вид эксперимента или он расходится с файлом
    """
    config: Dict[str, Any] = load_config(args.config) if args.config else {'schema_version': SCHEMA_VERSION}
    if args.kind is None:
        if not args.config:
            raise ConfigError(['Нужна подкоманда или --config'])
        return config
    if config.get('kind') not in (None, args.kind):
        raise ConfigError([f"Подкоманда {args.kind} не совпадает с видом в файле: {config['kind']}"])
    config['kind'] = args.kind
    if not args.config:
        config['weights'] = DEFAULT_WEIGHTS

    for name in ('weights', 'd', 'bandwidth', 'bandwidths', 'seed', 'output_dir', 'xlsx'):
        value = getattr(args, name, None)
        if value is not None:
            config[name] = value

    dests = [dest for _, dest, _, _ in KIND_FLAGS[args.kind]] + (['per_path'] if args.kind == 'mc-riesz' else [])
    for dest in dests:
        value = getattr(args, dest, None)
        if value is not None:
            config.setdefault('params', {})[dest] = value
    return config


def main(argv: Optional[Sequence[str]] = None):
    """Основная функция скрипта"""
    # Парсим аргументы командной строки
    args = parse_args(argv)

    # Загружаем переменные окружения из .env файла
    load_dotenv()

    # Настраиваем логгирование
    setup_logger(args.log_level, args.log_file)

    try:
        config = config_from_args(args)
        result = run_config(config)
    except ConfigError as e:
        for error in e.errors:
            logger.error(f"Ошибка конфигурации: {error}")
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.exception(f"Критическая ошибка: {e}")
        return EXIT_FAILED

    passed = sum(report.passed for report in result.reports)
    if result.passed:
        logger.success(f"Эксперимент {result.config['kind']} завершён: "
                       f"выполнено {passed}/{len(result.reports)} проверок, "
                       f"результаты в {result.config['output_dir']}")
    else:
        logger.warning(f"Эксперимент {result.config['kind']} завершён с нарушениями: "
                       f"выполнено {passed}/{len(result.reports)} проверок, "
                       f"результаты в {result.config['output_dir']}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
