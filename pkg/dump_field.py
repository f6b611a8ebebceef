#!/usr/bin/env python
# dump_field.py
"""
Отладочный скрипт: запись коэффициентов поля в CSV (n_1..n_d, re, im)
"""
import os
import sys
import argparse
from typing import Optional, Sequence

from dotenv import load_dotenv
from loguru import logger

# Добавляем текущую директорию в путь для импортов
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

# Импортируем модули проекта
from src.utils.logger import setup_logger, add_logging_args
from src.experiments.config import DEFAULT_BANDWIDTH, DEFAULT_D, build_field
from src.spectral import FrequencyLattice, WeightModel, write_field_csv


def parse_args(argv: Optional[Sequence[str]] = None):
    """Парсинг аргументов командной строки"""
    parser = argparse.ArgumentParser(
        description='Запись коэффициентов поля в CSV',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument(
        'field',
        help="Поле: 'cos:<n>', 'sin:<n>', 'random:<seed>[:<profile>]', 'lacunary:<theta>'"
    )
    parser.add_argument('--weights', default='power:0.5', help='Описание весов')
    parser.add_argument('--d', type=int, default=DEFAULT_D, help='Размерность тора')
    parser.add_argument('--bandwidth', type=int, default=DEFAULT_BANDWIDTH, help='Полоса B_1 по первой оси')
    parser.add_argument('--output', default='field.csv', help='Путь к CSV-файлу')
    parser = add_logging_args(parser)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None):
    """Основная функция скрипта"""
    args = parse_args(argv)

    # Загружаем переменные окружения из .env файла
    load_dotenv()

    # Настраиваем логгирование
    setup_logger(args.log_level, args.log_file)

    try:
        w = WeightModel.from_spec(args.weights, args.d)
        lattice = FrequencyLattice.for_weights(w, args.bandwidth)
        field = build_field(args.field, lattice, w)
        write_field_csv(field, args.output)
    except ValueError as e:
        logger.error(f"Некорректные параметры: {e}")
        return 2
    except Exception as e:
        logger.exception(f"Критическая ошибка: {e}")
        return 1

    logger.success(f"Поле {args.field} на решётке {lattice.bandwidths} записано в {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
