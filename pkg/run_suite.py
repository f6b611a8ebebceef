#!/usr/bin/env python
# run_suite.py
"""
Запуск набора критериев приёмки: acceptance (полный) или quick (быстрая проверка)
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
from src.experiments.config import ConfigError
from src.experiments.runner import EXIT_CONFIG_ERROR, EXIT_FAILED
from src.experiments.suite import SUITES, run_suite


def parse_args(argv: Optional[Sequence[str]] = None):
    """Парсинг аргументов командной строки"""
    parser = argparse.ArgumentParser(
        description='Запуск набора критериев приёмки',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument(
        'name',
        help=f"Имя набора: {', '.join(SUITES)}"
    )
    parser.add_argument(
        '--output-dir',
        help='Каталог для итогового JSON (по умолчанию LAB_OUTPUT_DIR или results)'
    )
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
        summary, exit_code = run_suite(args.name, args.output_dir)
    except ConfigError as e:
        logger.error(f"Ошибка: {e}")
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.exception(f"Критическая ошибка: {e}")
        return EXIT_FAILED

    failed = [entry['id'] for entry in summary['criteria'] if not entry['passed']]
    total = len(summary['criteria'])
    if failed:
        logger.error(f"Набор {args.name}: не выполнены {len(failed)}/{total} критериев: {', '.join(failed)}")
    else:
        logger.success(f"Набор {args.name}: выполнены все {total} критериев")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
