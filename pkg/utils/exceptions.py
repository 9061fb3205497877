class GaussNCError(Exception):
    """Базовое исключение библиотеки"""

    exit_code: int = 1


class MalformedInputError(GaussNCError, ValueError):
    """Неверная форма данных, несовпадение размерностей, ошибка разбора"""

    exit_code = 2


class InvalidStateError(GaussNCError, ValueError):
    """Матрица не задает физическое состояние"""

    exit_code = 3


class NoPRepresentationError(GaussNCError):
    """A - I не является строго положительно определенной"""

    exit_code = 3


class TruncationTooSmallError(GaussNCError):
    """Потеря следа при усечении пространства Фока превышает порог"""

    exit_code = 4

    def __init__(self, message: str, deficit: float = float("nan")):
        super().__init__(message)
        self.deficit = deficit


class NumericalFailureError(GaussNCError, ArithmeticError):
    """Плохая обусловленность или мнимый остаток выше допуска"""

    exit_code = 1


__all__ = [
    "GaussNCError",
    "MalformedInputError",
    "InvalidStateError",
    "NoPRepresentationError",
    "TruncationTooSmallError",
    "NumericalFailureError",
]
