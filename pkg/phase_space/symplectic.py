"""
Симплектическая линейная алгебра
Порядок координат (x1..xn, p1..pn), J = [[0, I], [-I, 0]]
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.linalg import expm, schur, sqrtm

from config.settings import Tolerances, resolve_tolerances
from utils.exceptions import InvalidStateError, MalformedInputError, NumericalFailureError
from utils.logger import logger


@dataclass(frozen=True)
class SymplecticForm:
    """Стандартная симплектическая форма для n мод"""

    n: int
    J: np.ndarray


@dataclass(frozen=True)
class WilliamsonDecomposition:
    """Разложение A = S^T D S, D = diag(D0, D0)"""

    S: np.ndarray
    D: np.ndarray

    @property
    def spectrum(self) -> np.ndarray:
        """Симплектические собственные значения по убыванию"""
        n = self.D.shape[0] // 2
        return np.diag(self.D)[:n].copy()

    def reconstruct(self) -> np.ndarray:
        return self.S.T @ self.D @ self.S


@dataclass(frozen=True)
class EulerFactors:
    """Одномодовое разложение S = O diag(m, 1/m) O'"""

    O: np.ndarray
    m: float
    O_prime: np.ndarray

    def assemble(self) -> np.ndarray:
        return self.O @ np.diag([self.m, 1.0 / self.m]) @ self.O_prime


def sympmat(n: int) -> np.ndarray:
    """Матрица J для n мод"""
    if n < 1:
        raise MalformedInputError(f"Число мод должно быть положительным, получено {n}")
    identity = np.eye(n)
    zeros = np.zeros((n, n))
    return np.block([[zeros, identity], [-identity, zeros]])


def standard_form(n: int) -> SymplecticForm:
    """
    Стандартная симплектическая форма

    Args:
        n: Число мод (n >= 1)

    Returns:
        SymplecticForm с матрицей J
    """
    return SymplecticForm(n=n, J=sympmat(n))


def rotation(theta: float) -> np.ndarray:
    """Одномодовый поворот R(theta) = [[c, s], [-s, c]]"""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def mode_count(matrix: np.ndarray) -> int:
    """Число мод квадратной матрицы четного размера"""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise MalformedInputError(f"Ожидалась квадратная матрица, получена форма {matrix.shape}")
    if matrix.shape[0] == 0 or matrix.shape[0] % 2:
        raise MalformedInputError(f"Размер матрицы должен быть четным, получено {matrix.shape[0]}")
    return matrix.shape[0] // 2


def check_symmetric(matrix: np.ndarray, tol: float) -> np.ndarray:
    """Проверка симметрии, возвращает симметризованную вещественную матрицу"""
    matrix = np.asarray(matrix, dtype=float)
    mode_count(matrix)
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.T)) > tol * scale:
        raise MalformedInputError("Матрица не симметрична")
    return (matrix + matrix.T) / 2


def check_positive_definite(matrix: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Симметричная положительно определенная матрица или InvalidStateError"""
    matrix = check_symmetric(matrix, tol)
    smallest = float(np.linalg.eigvalsh(matrix)[0])
    if smallest <= 0:
        raise InvalidStateError(f"Матрица не положительно определена (min eig = {smallest:.3g})")
    return matrix


def is_symplectic(S: np.ndarray, tol: float = 1e-9) -> bool:
    """True, если ||S^T J S - J||_max <= tol"""
    n = mode_count(S)
    J = sympmat(n)
    S = np.asarray(S, dtype=float)
    return bool(np.max(np.abs(S.T @ J @ S - J)) <= tol)


def is_orthogonal_symplectic(O: np.ndarray, tol: float = 1e-9) -> bool:
    O = np.asarray(O, dtype=float)
    orthogonal = np.max(np.abs(O.T @ O - np.eye(O.shape[0]))) <= tol
    return bool(orthogonal) and is_symplectic(O, tol)


def _symmetric_sqrt(matrix: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(matrix)
    return (vecs * np.sqrt(vals)) @ vecs.T


def symplectic_spectrum(A: np.ndarray, tolerances: Optional[Tolerances] = None) -> np.ndarray:
    """
    Симплектический спектр корреляционной матрицы

    Args:
        A: Симметричная положительно определенная матрица 2n x 2n
        tolerances: Допуски (по умолчанию из настроек)

    Returns:
        Массив d_k по убыванию, по одному на моду
    """
    tolerances = resolve_tolerances(tolerances)
    A = check_symmetric(A, tolerances.predicate_tol)
    n = mode_count(A)

    if n == 1:
        det = float(np.linalg.det(A))
        if det <= 0 or A[0, 0] <= 0:
            raise InvalidStateError("Матрица не положительно определена")
        return np.array([np.sqrt(det)])

    A = check_positive_definite(A, tolerances.predicate_tol)
    root = _symmetric_sqrt(A)
    # i * root J root эрмитова, ее спектр {+d_k, -d_k}
    skew = root @ sympmat(n) @ root
    values = np.linalg.eigvalsh(1j * skew)
    return np.sort(np.abs(values[n:]))[::-1]


def williamson(A: np.ndarray, tolerances: Optional[Tolerances] = None) -> WilliamsonDecomposition:
    """
    Разложение Вильямсона A = S^T D S

    Кососимметричная матрица A^{1/2} J A^{1/2} приводится к блочно-диагональному
    виду вещественным разложением Шура. Калибровка: моды по убыванию d_k, в каждой
    моде поворот выбран так, что в опорном столбце строки p-компонента равна нулю,
    а x-компонента неотрицательна (опорный столбец - с наибольшей нормой пары).

    Args:
        A: Симметричная положительно определенная матрица
        tolerances: Допуски

    Returns:
        WilliamsonDecomposition

    Raises:
        NumericalFailureError: число обусловленности выше порога
    """
    tolerances = resolve_tolerances(tolerances)
    A = check_positive_definite(A, tolerances.predicate_tol)
    n = mode_count(A)

    condition = float(np.linalg.cond(A))
    if condition > tolerances.williamson_condition_cap:
        raise NumericalFailureError(
            f"Плохая обусловленность матрицы: {condition:.3g} > {tolerances.williamson_condition_cap:.3g}"
        )

    root = _symmetric_sqrt(A)
    skew = root @ sympmat(n) @ root
    T, Z = schur(skew, output="real")

    values: List[float] = []
    x_columns: List[np.ndarray] = []
    p_columns: List[np.ndarray] = []
    for i in range(n):
        b, c = T[2 * i, 2 * i + 1], T[2 * i + 1, 2 * i]
        x_col, p_col = Z[:, 2 * i], Z[:, 2 * i + 1]
        if b < 0:
            x_col, p_col = p_col, x_col
        values.append(float(np.sqrt(abs(b * c))))
        x_columns.append(x_col)
        p_columns.append(p_col)

    order = np.argsort(values, kind="stable")[::-1]
    d = np.array([values[k] for k in order])
    W = np.column_stack([x_columns[k] for k in order] + [p_columns[k] for k in order])

    D = np.diag(np.concatenate([d, d]))
    S = np.diag(1.0 / np.sqrt(np.concatenate([d, d]))) @ W.T @ root
    S = _fix_gauge(S, n)

    residual = float(np.max(np.abs(S.T @ D @ S - A)))
    if residual > max(1e-10, 1e-12 * condition) * max(1.0, float(np.max(np.abs(A)))):
        logger.warning(f"Большая невязка разложения Вильямсона: {residual:.3g}")

    return WilliamsonDecomposition(S=S, D=D)


def _fix_gauge(S: np.ndarray, n: int) -> np.ndarray:
    S = S.copy()
    for k in range(n):
        row_x, row_p = S[k].copy(), S[n + k].copy()
        pivot = int(np.argmax(row_x ** 2 + row_p ** 2))
        alpha = np.arctan2(row_p[pivot], row_x[pivot])
        c, s = np.cos(alpha), np.sin(alpha)
        S[k] = c * row_x + s * row_p
        S[n + k] = -s * row_x + c * row_p
    return S


def euler_one_mode(S: np.ndarray, tol: float = 1e-9) -> EulerFactors:
    """
    Одномодовое разложение S = O diag(m, 1/m) O' с поворотами O, O'

    Args:
        S: Симплектическая матрица 2 x 2

    Returns:
        EulerFactors с m >= 1
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2, 2):
        raise MalformedInputError("Разложение Эйлера реализовано только для одной моды")
    if not is_symplectic(S, tol):
        raise MalformedInputError("Матрица не симплектична")

    U, sigma, Vt = np.linalg.svd(S)
    if np.linalg.det(U) < 0:
        flip = np.diag([1.0, -1.0])
        U, Vt = U @ flip, flip @ Vt
    return EulerFactors(O=U, m=float(sigma[0]), O_prime=Vt)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Случайная симплектическая матрица expm(J H) со случайной симметричной H"""
    H = rng.normal(scale=scale, size=(2 * n, 2 * n))
    H = (H + H.T) / 2
    return expm(sympmat(n) @ H)


def orthogonal_symplectic_generator(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Генератор [[X, Y], [-Y, X]] при антисимметричной X и симметричной Y"""
    return np.block([[X, Y], [-Y, X]])


def random_orthogonal_symplectic(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Случайная ортогональная симплектическая матрица"""
    X = rng.normal(scale=scale, size=(n, n))
    Y = rng.normal(scale=scale, size=(n, n))
    generator = orthogonal_symplectic_generator((X - X.T) / 2, (Y + Y.T) / 2)
    return expm(generator)


def principal_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Главный квадратный корень несимметричной матрицы"""
    root = sqrtm(matrix)
    if np.iscomplexobj(root) and np.max(np.abs(root.imag)) < 1e-10 * max(1.0, np.max(np.abs(root.real))):
        root = root.real
    return root
