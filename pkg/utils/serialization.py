import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


def format_number(value: float) -> str:
    """Число с 12 значащими цифрами, без зависимости от локали"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.12g}"
    if text == "-0":
        text = "0"
    return text


def _normalize(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [_normalize(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, Mapping):
        return {str(key): _normalize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(item) for item in value]
    return value


def _quote(text: str) -> str:
    # управляющие символы экранируются, кириллица остается как есть
    return json.dumps(text, ensure_ascii=False)


def _render(value: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    closing = " " * (indent * level)

    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = format_number(value)
        # JSON не знает inf/nan
        return f'"{text}"' if text in ("inf", "-inf", "nan") else text
    if isinstance(value, str):
        return _quote(value)
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(item, (list, dict)) for item in value):
            return "[" + ", ".join(_render(item, indent, level + 1) for item in value) + "]"
        items = ",\n".join(pad + _render(item, indent, level + 1) for item in value)
        return "[\n" + items + "\n" + closing + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{pad}{_quote(key)}: {_render(item, indent, level + 1)}" for key, item in value.items()
        )
        return "{\n" + items + "\n" + closing + "}"
    raise TypeError(f"Неподдерживаемый тип для сериализации: {type(value).__name__}")


def to_json(payload: Mapping[str, Any], indent: int = 2) -> str:
    """
    JSON текст с фиксированным форматом чисел

    Args:
        payload: Данные отчета (numpy значения допустимы)
        indent: Отступ

    Returns:
        Текст с завершающим переводом строки
    """
    return _render(_normalize(payload), indent, 0) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV текст с обязательной строкой заголовка"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(cell) for cell in row])
    return buffer.getvalue()


def _csv_cell(cell: Any) -> str:
    cell = _normalize(cell)
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, float):
        return format_number(cell)
    if cell is None:
        return ""
    return str(cell)


__all__ = ["format_number", "to_json", "to_csv"]
