import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Настройки окружения
    Из переменных окружения читается только вербозность логов
    """

    # ========== ЛОГИРОВАНИЕ ==========
    LOG_LEVEL: str = "INFO"

    # Пустая строка - логи только в stderr
    LOG_FILE: str = ""

    model_config = SettingsConfigDict(
        env_prefix="GAUSSNC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


# Создаем экземпляр настроек
settings = Settings()


class Tolerances(BaseModel):
    """Численные допуски и пороги"""

    # Допуск предикатов (симплектичность, чистота, классичность)
    predicate_tol: float = 1e-9

    # Максимальное число обусловленности для разложения Вильямсона
    williamson_condition_cap: float = 1e12

    # Моды с d_k <= 1 + pure_clamp считаются чистыми
    pure_clamp: float = 1e-12

    # Мнимый остаток квадратичных форм произведений
    product_imag_residue: float = 1e-10

    # Мнимый остаток в формуле верности
    fidelity_imag_residue: float = 1e-8

    # Допустимая потеря следа при усечении пространства Фока
    truncation_deficit_cap: float = 1e-6

    # Порог отсечения отрицательных собственных значений
    negative_eig_clip: float = 1e-10

    # Допуск сравнения аналитики с оракулом
    oracle_tolerance: float = 1e-4


DEFAULT_TOLERANCES = Tolerances()


def resolve_tolerances(tolerances: Optional[Tolerances]) -> Tolerances:
    """Подстановка допусков по умолчанию"""
    return tolerances if tolerances is not None else DEFAULT_TOLERANCES


class GridAxis(BaseModel):
    """Одна ось сетки: равномерные точки от start до stop"""

    start: float
    stop: float
    count: int = 1

    @field_validator("count")
    @classmethod
    def _positive_count(cls, value: int) -> int:
        if value < 1:
            raise ValueError("число точек оси должно быть положительным")
        return value

    def values(self) -> List[float]:
        """Значения оси в порядке возрастания индекса"""
        if self.count == 1:
            return [self.start]
        if math.isinf(self.start) or math.isinf(self.stop):
            raise ValueError("бесконечная граница допустима только для одиночной точки")
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * step for i in range(self.count)]

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """
        Разбор оси из строки

        Args:
            text: "start:stop:count" или одно число ("inf" допустимо)

        Returns:
            Ось сетки
        """
        parts = [part.strip() for part in text.split(":")]
        if len(parts) == 1:
            value = float(parts[0])
            return cls(start=value, stop=value, count=1)
        if len(parts) != 3:
            raise ValueError(f"ось должна иметь вид start:stop:count, получено '{text}'")
        return cls(start=float(parts[0]), stop=float(parts[1]), count=int(parts[2]))


class GridSpec(BaseModel):
    """Сетка (d, m, g) для сканирования шума"""

    d: GridAxis
    m: GridAxis
    g: GridAxis

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """
        Разбор сетки из строки вида "d=1:3:21,m=2:3:11,g=1:4:4"

        Args:
            text: Описание сетки

        Returns:
            Спецификация сетки
        """
        axes: Dict[str, GridAxis] = {}
        for chunk in filter(None, (part.strip() for part in text.split(","))):
            if "=" not in chunk:
                raise ValueError(f"ожидалось имя=значение, получено '{chunk}'")
            name, value = (item.strip() for item in chunk.split("=", 1))
            if name not in ("d", "m", "g"):
                raise ValueError(f"неизвестная ось сетки '{name}'")
            axes[name] = GridAxis.parse(value)
        missing = {"d", "m", "g"} - set(axes)
        if missing:
            raise ValueError(f"не заданы оси сетки: {', '.join(sorted(missing))}")
        return cls(**axes)


class RunConfig(BaseModel):
    """
    Конфигурация одного запуска CLI
    Значения по умолчанию документированы здесь
    """

    command: Literal["classify", "measure", "sweep", "optimize", "oracle-compare"]
    input: Optional[str] = None
    second: Optional[str] = None
    out: Optional[str] = None
    format: Optional[Literal["json", "csv"]] = None
    which: str = "all"
    seed: int = 0
    trunc: int = 80
    budget: int = 4000
    workers: int = 1
    grid: Optional[GridSpec] = None
    tolerances: Tolerances = Tolerances()

    @field_validator("trunc")
    @classmethod
    def _trunc_at_least_two(cls, value: int) -> int:
        if value < 2:
            raise ValueError("размер усечения должен быть не меньше 2")
        return value

    @field_validator("grid", mode="before")
    @classmethod
    def _grid_from_text(cls, value: Any) -> Any:
        if isinstance(value, str):
            return GridSpec.parse(value)
        return value

    @model_validator(mode="after")
    def _csv_for_sweep_only(self) -> "RunConfig":
        if self.format == "csv" and self.command != "sweep":
            raise ValueError(f"формат csv доступен только для sweep, получена команда {self.command}")
        return self


def load_run_config(config_path: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """
    Сборка конфигурации запуска: флаги > файл конфигурации > значения по умолчанию

    Args:
        config_path: Путь к JSON файлу конфигурации (может быть None)
        overrides: Значения из флагов командной строки (None означает "не задано")

    Returns:
        Проверенная конфигурация запуска
    """
    from utils.exceptions import MalformedInputError

    merged: Dict[str, Any] = {}

    if config_path:
        try:
            merged.update(json.loads(Path(config_path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as e:
            raise MalformedInputError(f"Не удалось прочитать файл конфигурации {config_path}: {e}")

    tolerance_overrides = overrides.pop("tolerances", None) or {}
    merged.update({key: value for key, value in overrides.items() if value is not None})

    if tolerance_overrides:
        tolerances = dict(merged.get("tolerances") or {})
        tolerances.update(tolerance_overrides)
        merged["tolerances"] = tolerances

    try:
        return RunConfig(**merged)
    except (ValidationError, ValueError) as e:
        raise MalformedInputError(f"Некорректная конфигурация: {e}")
