# src/experiments/reports.py
import json
import logging
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Sequence

import pandas as pd

from ..utils.report import ExperimentReport, to_serializable

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
WORKBOOK_FILE = "tables.xlsx"
TABLE_FLOAT_FORMAT = "%.12g"
# Ограничение Excel на длину имени листа
SHEET_NAME_LIMIT = 31


def collect_tables(reports: Sequence[ExperimentReport]) -> Dict[str, pd.DataFrame]:
    """
    Таблицы всех отчётов; при совпадении имён добавляется имя отчёта

    Args:
        reports: Отчёты запуска

    Returns:
        Dict[str, pd.DataFrame]: Имя таблицы -> таблица в порядке отчётов
    """
    tables: Dict[str, pd.DataFrame] = {}
    for report in reports:
        for name, frame in report.tables.items():
            key = name
            if key in tables:
                key = f"{name}__{report.name}".replace("[", "_").replace("]", "").replace(",", "_")
            suffix = 2
            while key in tables:
                key = f"{name}__{suffix}"
                suffix += 1
            tables[key] = frame
    return tables


def build_summary(reports: Sequence[ExperimentReport], config: Dict[str, Any],
                  config_digest: str) -> Dict[str, Any]:
    """Содержимое report.json: конфигурация, вердикт и отчёты без таблиц"""
    return {
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": to_serializable(config),
        "config_hash": config_digest,
        "passed": all(report.passed for report in reports),
        "reports": [report.to_dict() for report in reports],
    }


def write_outputs(reports: Sequence[ExperimentReport], config: Dict[str, Any], config_digest: str,
                  output_dir: str, xlsx: bool = False) -> List[str]:
    """
    Запись report.json, <table>.tsv и (по запросу) tables.xlsx

    Args:
        reports: Отчёты запуска
        config: Разрешённая конфигурация
        config_digest: Хэш конфигурации
        output_dir: Каталог вывода
        xlsx: Записать книгу Excel со всеми таблицами

    Returns:
        List[str]: Пути записанных файлов
    """
    os.makedirs(output_dir, exist_ok=True)
    written = []

    summary = build_summary(reports, config, config_digest)
    path = os.path.join(output_dir, REPORT_FILE)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, ensure_ascii=False, indent=2)
        f.write("\n")
    written.append(path)

    tables = collect_tables(reports)
    for name, frame in tables.items():
        path = os.path.join(output_dir, f"{name}.tsv")
        frame.to_csv(path, sep="\t", index=False, float_format=TABLE_FLOAT_FORMAT)
        written.append(path)

    if xlsx and tables:
        path = os.path.join(output_dir, WORKBOOK_FILE)
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            used = set()
            for name, frame in tables.items():
                sheet = name[:SHEET_NAME_LIMIT]
                k = 2
                while sheet in used:
                    sheet = f"{name[:SHEET_NAME_LIMIT - 3]}~{k}"
                    k += 1
                used.add(sheet)
                frame.to_excel(writer, sheet_name=sheet, index=False)
        written.append(path)

    logger.info(f"Записано файлов: {len(written)} в {output_dir}")
    return written
