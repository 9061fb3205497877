import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from loguru import logger

from config.settings import settings

LOG_LEVEL = settings.LOG_LEVEL
LOG_FILE = settings.LOG_FILE


def setup_logger(level: Optional[str] = None, log_file: Optional[str] = None):
    """
    Настройка системы логирования
    stdout зарезервирован под данные, поэтому консольный вывод идет в stderr

    Args:
        level: Уровень логирования (по умолчанию из настроек)
        log_file: Путь к файлу логов (пустая строка - без файла)
    """
    level = level or LOG_LEVEL
    log_file = LOG_FILE if log_file is None else log_file

    # Удаляем стандартный обработчик
    logger.remove()

    log_format = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
        "<level>{message}</level>"
    )

    logger.add(
        sys.stderr,
        format=log_format,
        level=level,
        colorize=True,
        backtrace=True,
        diagnose=False,
    )

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            format=log_format,
            level=level,
            rotation="10 MB",
            retention="1 month",
            compression="zip",
            backtrace=True,
            diagnose=False,
            encoding="utf-8",
        )

    logger.debug("Система логирования инициализирована")


def log_measure(name: str, value: float, details: str = ""):
    """Логирование вычисленной меры"""
    if details:
        logger.debug(f"{name} = {value:.12g} ({details})")
    else:
        logger.debug(f"{name} = {value:.12g}")


def log_scan_result(name: str, rows: int, violations: int = 0, total_time: float = None):
    """Логирование результатов сканирования сетки"""
    message = f"Сканирование {name}: строк={rows}, нарушений={violations}"
    if total_time is not None:
        message += f", время={total_time:.2f}s"
    if violations:
        logger.warning(message)
    else:
        logger.info(message)


def log_oracle_comparison(measure: str, analytic: float, oracle: float, tolerance: float):
    """Логирование сравнения аналитики с оракулом"""
    diff = abs(analytic - oracle)
    if diff > tolerance:
        logger.error(
            f"Оракул [{measure}]: аналитика={analytic:.12g}, оракул={oracle:.12g}, "
            f"расхождение={diff:.3g} > {tolerance:.3g}"
        )
    else:
        logger.info(f"Оракул [{measure}]: расхождение={diff:.3g}")


def log_finding(topic: str, message: str):
    """Логирование численной находки (расхождение с аналитической формулой и т.п.)"""
    logger.warning(f"🔎 Находка [{topic}]: {message}")


class PerformanceLogger:
    """Логгер для мониторинга производительности"""

    def __init__(self, operation_name: str):
        self.operation_name = operation_name
        self.start_time = None
        self.duration = 0.0

    def __enter__(self):
        self.start_time = datetime.now()
        logger.debug(f"Начало операции: {self.operation_name}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.start_time:
            self.duration = (datetime.now() - self.start_time).total_seconds()
            if exc_type:
                logger.error(f"Операция {self.operation_name} завершена с ошибкой за {self.duration:.2f}s")
            else:
                logger.debug(f"Операция {self.operation_name} завершена за {self.duration:.2f}s")


# Инициализируем логгер при импорте
setup_logger()


__all__ = [
    "logger",
    "setup_logger",
    "log_measure",
    "log_scan_result",
    "log_oracle_comparison",
    "log_finding",
    "PerformanceLogger",
]
