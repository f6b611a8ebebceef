# src/utils/report.py
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

# Число значащих цифр при сериализации
SIGNIFICANT_DIGITS = 12


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    if value == 0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def to_serializable(value: Any) -> Any:
    """Приведение значений (numpy, кортежи, вложенные словари) к JSON-совместимым типам"""
    if isinstance(value, dict):
        return {str(k): to_serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_serializable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_serializable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return round_significant(value)
    if isinstance(value, complex):
        return {"re": round_significant(value.real), "im": round_significant(value.imag)}
    return value


@dataclass
class ExperimentReport:
    """
    Результат проверки неравенства: запас (bound - value, >= 0 при выполнении),
    подобранные константы, свидетель нарушения и таблицы для выгрузки.
    """

    name: str
    tag: str
    passed: bool = True
    worst_slack: float = math.inf
    constants: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def record(self, slack: float, witness: Dict[str, Any], tolerance: float = 0.0) -> bool:
        """
        Учёт очередной проверки; первый самый сильный нарушитель становится свидетелем

        Args:
            slack: bound - value
            witness: Описание проверяемого случая
            tolerance: Допустимое отрицательное значение запаса

        Returns:
            bool: Выполнено ли неравенство
        """
        ok = slack >= -tolerance
        if slack < self.worst_slack:
            self.worst_slack = float(slack)
            if not ok or self.passed:
                self.witness = dict(witness, slack=float(slack))
        if not ok:
            self.passed = False
        return ok

    def fail(self, reason: str, witness: Optional[Dict[str, Any]] = None):
        self.passed = False
        self.notes.append(reason)
        if witness is not None:
            self.witness = witness

    def to_dict(self) -> Dict[str, Any]:
        """Словарь для JSON (без таблиц, только их имена и размеры)"""
        return to_serializable({
            "name": self.name,
            "tag": self.tag,
            "passed": self.passed,
            "worst_slack": self.worst_slack,
            "constants": self.constants,
            "witness": self.witness,
            "tables": {name: len(frame) for name, frame in self.tables.items()},
            "notes": self.notes,
            "provenance": self.provenance,
        })
