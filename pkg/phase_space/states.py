"""
Гауссовы состояния с нулевым средним
Состояние задается корреляционной матрицей A: CF_u = exp(-1/4 u^T A u), вакуум A = I
"""

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator
from scipy.linalg import block_diag

from config.settings import Tolerances, resolve_tolerances
from phase_space.operator_cf import GaussianOperatorCF
from phase_space.symplectic import (
    check_positive_definite,
    check_symmetric,
    mode_count,
    random_orthogonal_symplectic,
    rotation,
    symplectic_spectrum,
    sympmat,
)
from utils.exceptions import (
    InvalidStateError,
    MalformedInputError,
    NoPRepresentationError,
)
from utils.logger import logger


class StateClass(Enum):
    """Класс гауссова состояния"""

    INVALID = "Invalid"
    PURE_NONCLASSICAL = "PureNonclassical"
    PURE_COHERENT = "PureCoherent"
    MIXED_CLASSICAL = "MixedClassical"
    MIXED_NONCLASSICAL = "MixedNonclassical"


@dataclass(frozen=True)
class OneModeParams:
    """Параметры одномодового состояния: тепловой d, сжатие m, угол theta"""

    d: float
    m: float
    theta: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return {"d": self.d, "m": self.m, "theta": self.theta}


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """
    Корреляционная матрица гауссова состояния
    Конструктор проверяет симметрию и положительную определенность,
    физическая допустимость проверяется отдельно (classify, is_valid)
    """

    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", check_positive_definite(self.A))

    @property
    def n(self) -> int:
        return mode_count(self.A)

    @classmethod
    def vacuum(cls, n: int = 1) -> "CorrelationMatrix":
        return cls(np.eye(2 * n))

    @classmethod
    def thermal(cls, d: float, n: int = 1) -> "CorrelationMatrix":
        return cls(d * np.eye(2 * n))


StateLike = Union[CorrelationMatrix, np.ndarray]


def as_matrix(state: StateLike) -> np.ndarray:
    """Матрица A из CorrelationMatrix или массива"""
    if isinstance(state, CorrelationMatrix):
        return state.A
    return np.asarray(state, dtype=float)


def direct_sum(*states: StateLike) -> np.ndarray:
    """
    Блочно-диагональное многомодовое состояние в порядке (x1..xn, p1..pn)

    Args:
        states: Корреляционные матрицы подсистем

    Returns:
        Матрица A составной системы
    """
    matrices = [as_matrix(state) for state in states]
    sizes = [mode_count(matrix) for matrix in matrices]
    xx = block_diag(*[matrix[:k, :k] for matrix, k in zip(matrices, sizes)])
    xp = block_diag(*[matrix[:k, k:] for matrix, k in zip(matrices, sizes)])
    px = block_diag(*[matrix[k:, :k] for matrix, k in zip(matrices, sizes)])
    pp = block_diag(*[matrix[k:, k:] for matrix, k in zip(matrices, sizes)])
    return np.block([[xx, xp], [px, pp]])


def cf_eval(state: StateLike, u: np.ndarray) -> float:
    """Значение характеристической функции exp(-1/4 u^T A u)"""
    A = as_matrix(state)
    u = np.asarray(u, dtype=float)
    if u.shape != (A.shape[0],):
        raise MalformedInputError(f"Вектор u должен иметь длину {A.shape[0]}, получено {u.shape}")
    return float(np.exp(-0.25 * (u @ A @ u)))


def _purity_residual(A: np.ndarray) -> float:
    J = sympmat(mode_count(A))
    return float(np.max(np.abs(A + J @ np.linalg.inv(A) @ J)))


def is_valid(state: StateLike, tolerances: Optional[Tolerances] = None) -> bool:
    """Все симплектические собственные значения >= 1 - tol"""
    tolerances = resolve_tolerances(tolerances)
    try:
        spectrum = symplectic_spectrum(as_matrix(state), tolerances)
    except InvalidStateError:
        return False
    return bool(spectrum[-1] >= 1 - tolerances.predicate_tol)


def is_pure(state: StateLike, tolerances: Optional[Tolerances] = None) -> bool:
    """A = -J A^{-1} J в пределах допуска"""
    tolerances = resolve_tolerances(tolerances)
    return _purity_residual(as_matrix(state)) <= tolerances.predicate_tol


def is_classical(state: StateLike, tolerances: Optional[Tolerances] = None) -> bool:
    """A - I положительно полуопределена (граница включена)"""
    tolerances = resolve_tolerances(tolerances)
    A = as_matrix(state)
    return bool(np.linalg.eigvalsh(A - np.eye(A.shape[0]))[0] >= -tolerances.predicate_tol)


def classify(state: StateLike, tolerances: Optional[Tolerances] = None) -> StateClass:
    """
    Классификация гауссова состояния

    Args:
        state: Корреляционная матрица (симметричная)
        tolerances: Допуски

    Returns:
        StateClass

    Raises:
        MalformedInputError: несимметричная матрица
    """
    tolerances = resolve_tolerances(tolerances)
    A = check_symmetric(as_matrix(state), tolerances.predicate_tol)

    if not is_valid(A, tolerances):
        return StateClass.INVALID

    pure = is_pure(A, tolerances)
    classical = is_classical(A, tolerances)

    if pure:
        return StateClass.PURE_COHERENT if classical else StateClass.PURE_NONCLASSICAL
    return StateClass.MIXED_CLASSICAL if classical else StateClass.MIXED_NONCLASSICAL


def product_cf(first: StateLike, second: StateLike) -> GaussianOperatorCF:
    """
    Характеристическая функция произведения rho1 * rho2

    Множитель det((A1 + A2)/2)^{-1/2} равен Tr rho1 rho2,
    форма A2 - (A2 - iJ)(A1 + A2)^{-1}(A2 + iJ)
    """
    A1, A2 = as_matrix(first), as_matrix(second)
    if A1.shape != A2.shape:
        raise MalformedInputError(f"Несовпадение размерностей: {A1.shape} и {A2.shape}")
    return GaussianOperatorCF.density(A1).compose(GaussianOperatorCF.density(A2))


def square_cf(state: StateLike) -> GaussianOperatorCF:
    """Характеристическая функция rho^2: множитель det(A)^{-1/2}, форма (A - J A^{-1} J)/2"""
    A = as_matrix(state)
    J = sympmat(mode_count(A))
    form = (A - J @ np.linalg.inv(A) @ J) / 2
    return GaussianOperatorCF(scale=float(np.linalg.det(A) ** -0.5), form=(form + form.T) / 2)


def triple_trace(first: StateLike, second: StateLike, third: StateLike) -> complex:
    """Tr rho1 rho2 rho3 (инвариантен относительно циклической перестановки)"""
    operator = product_cf(first, second).compose(GaussianOperatorCF.density(as_matrix(third)))
    return complex(operator.trace())


def one_mode_matrix(d: float, m: float, theta: float) -> np.ndarray:
    """R(theta)^T diag(d m^2, d / m^2) R(theta) без проверки допустимости"""
    R = rotation(theta)
    A = R.T @ np.diag([d * m * m, d / (m * m)]) @ R
    return (A + A.T) / 2


def params_to_cov(params: OneModeParams, tolerances: Optional[Tolerances] = None) -> np.ndarray:
    """
    Сборка одномодовой корреляционной матрицы из (d, m, theta)

    Args:
        params: Параметры состояния

    Returns:
        Матрица 2 x 2
    """
    tolerances = resolve_tolerances(tolerances)
    if params.d < 1 - tolerances.predicate_tol:
        raise InvalidStateError(f"Тепловой параметр d = {params.d} меньше 1")
    if params.m <= 0:
        raise MalformedInputError(f"Параметр сжатия должен быть положительным, получено {params.m}")
    return one_mode_matrix(params.d, params.m, params.theta)


def cov_to_params(state: StateLike, tolerances: Optional[Tolerances] = None) -> OneModeParams:
    """
    Параметры (d, m, theta) одномодового состояния по инвариантам det A и Tr A

    Ветвь m >= 1, theta в [0, pi); для изотропных состояний theta = 0
    """
    tolerances = resolve_tolerances(tolerances)
    A = check_positive_definite(as_matrix(state), tolerances.predicate_tol)
    if A.shape != (2, 2):
        raise MalformedInputError("Параметризация (d, m, theta) определена только для одной моды")

    d = float(np.sqrt(np.linalg.det(A)))
    if d < 1 - tolerances.predicate_tol:
        raise InvalidStateError(f"Недопустимое состояние: d = {d:.12g} < 1")
    d = max(d, 1.0)

    anisotropy = float(np.hypot(A[0, 0] - A[1, 1], 2 * A[0, 1]))
    trace = float(A[0, 0] + A[1, 1])
    if anisotropy <= 1e-12 * trace:
        return OneModeParams(d=d, m=1.0, theta=0.0)

    # m^2 - 1/m^2 = (lambda+ - lambda-) / d
    ratio = anisotropy / d
    m_squared = (ratio + np.sqrt(ratio * ratio + 4)) / 2
    theta = 0.5 * np.arctan2(2 * A[0, 1], A[0, 0] - A[1, 1])
    theta = float(np.mod(theta, np.pi))
    if np.isclose(theta, np.pi, rtol=0, atol=1e-15):
        theta = 0.0
    return OneModeParams(d=d, m=float(np.sqrt(m_squared)), theta=theta)


@dataclass(frozen=True, eq=False)
class GaussianPFunction:
    """
    P-функция классического гауссова состояния
    P(v) = normalizer * exp(1/4 v^T Q v), Q = J (A - I)^{-1} J
    """

    normalizer: float
    Q: np.ndarray
    shifted: np.ndarray

    def density(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=float)
        return float(self.normalizer * np.exp(0.25 * (v @ self.Q @ v)))

    @property
    def covariance(self) -> np.ndarray:
        """Ковариация распределения: -2 J (A - I) J"""
        J = sympmat(mode_count(self.shifted))
        cov = -2 * J @ self.shifted @ J
        return (cov + cov.T) / 2

    def sample(self, size: int, seed: Optional[int] = None) -> np.ndarray:
        """Выборка точек фазового пространства с фиксированным зерном"""
        rng = np.random.default_rng(seed)
        return rng.multivariate_normal(np.zeros(self.Q.shape[0]), self.covariance, size=size)


def p_function(state: StateLike, tolerances: Optional[Tolerances] = None) -> GaussianPFunction:
    """
    P-функция состояния

    Raises:
        NoPRepresentationError: A - I не является строго положительно определенной
    """
    tolerances = resolve_tolerances(tolerances)
    A = as_matrix(state)
    n = mode_count(A)
    shifted = A - np.eye(2 * n)
    smallest = float(np.linalg.eigvalsh(shifted)[0])
    if smallest <= tolerances.predicate_tol:
        raise NoPRepresentationError(
            f"P-представление не существует: min eig(A - I) = {smallest:.3g}"
        )
    J = sympmat(n)
    Q = J @ np.linalg.inv(shifted) @ J
    normalizer = (4 * np.pi) ** (-n) / np.sqrt(np.linalg.det(shifted))
    return GaussianPFunction(normalizer=float(normalizer), Q=(Q + Q.T) / 2, shifted=shifted)


def displaced_vacuum_cf(u: np.ndarray, v: np.ndarray) -> complex:
    """CF вакуума, смещенного в точку v: exp(-|u|^2/4) exp(i/2 u^T J v)"""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    J = sympmat(u.shape[0] // 2)
    return complex(np.exp(-0.25 * (u @ u)) * np.exp(0.5j * (u @ J @ v)))


def random_correlation_matrix(
    n: int,
    rng: np.random.Generator,
    max_thermal: float = 3.0,
    max_squeeze: float = 2.0,
) -> np.ndarray:
    """
    Случайное допустимое состояние S^T D S, S = O1 diag(m, 1/m) O2

    Args:
        n: Число мод
        rng: Генератор случайных чисел
        max_thermal: Верхняя граница d_k
        max_squeeze: Верхняя граница m_k

    Returns:
        Корреляционная матрица
    """
    d = rng.uniform(1.0, max_thermal, size=n)
    m = rng.uniform(1.0, max_squeeze, size=n)
    squeeze = np.diag(np.concatenate([m, 1 / m]))
    S = squeeze @ random_orthogonal_symplectic(n, rng)
    if n > 1:
        S = random_orthogonal_symplectic(n, rng) @ S
    A = S.T @ np.diag(np.concatenate([d, d])) @ S
    return (A + A.T) / 2


class _OneModePayload(BaseModel):
    d: float
    m: float
    theta: float = 0.0


class StatePayload(BaseModel):
    """JSON схема состояния: {"modes": n, "A": [[...]]} или {"one_mode": {...}}"""

    modes: Optional[int] = None
    A: Optional[list] = None
    one_mode: Optional[_OneModePayload] = None

    @model_validator(mode="after")
    def _exactly_one_form(self) -> "StatePayload":
        if (self.A is None) == (self.one_mode is None):
            raise ValueError("нужно задать ровно одно из полей 'A' или 'one_mode'")
        return self


def state_from_dict(payload: Dict[str, Any]) -> np.ndarray:
    """
    Корреляционная матрица из JSON объекта
    Допустимость не проверяется: недопустимые состояния нужны для classify
    """
    try:
        parsed = StatePayload(**payload)
    except (ValidationError, TypeError) as e:
        raise MalformedInputError(f"Некорректное описание состояния: {e}")

    if parsed.one_mode is not None:
        params = parsed.one_mode
        if params.d <= 0 or params.m <= 0:
            raise MalformedInputError("Параметры d и m должны быть положительными")
        return one_mode_matrix(params.d, params.m, params.theta)

    try:
        A = np.array(parsed.A, dtype=float)
    except (TypeError, ValueError) as e:
        raise MalformedInputError(f"Матрица A не является числовой: {e}")
    n = mode_count(A)
    if parsed.modes is not None and parsed.modes != n:
        raise MalformedInputError(f"Поле modes = {parsed.modes} не совпадает с размером A ({n} мод)")
    if not np.all(np.isfinite(A)):
        raise MalformedInputError("Матрица A содержит нечисловые значения")
    return check_symmetric(A, 1e-9)


def load_state(path: Union[str, Path]) -> np.ndarray:
    """Чтение состояния из JSON файла"""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise MalformedInputError(f"Не удалось прочитать состояние из {path}: {e}")
    if not isinstance(payload, dict):
        raise MalformedInputError(f"Файл {path} должен содержать JSON объект")
    logger.debug(f"Загружено состояние из {path}")
    return state_from_dict(payload)
