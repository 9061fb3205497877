"""
Гауссов канал шума Gamma(A) = A - J G^{-1} J и его одномодовые законы
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from config.settings import GridSpec, Tolerances, resolve_tolerances
from distances.measures import chi_one_mode, phi_measure_one_mode
from phase_space.states import OneModeParams, StateLike, as_matrix
from phase_space.symplectic import check_positive_definite, mode_count, sympmat
from utils.exceptions import MalformedInputError
from utils.logger import PerformanceLogger, log_finding, log_scan_result, logger


def inverse_strength(g: float) -> float:
    """s = 1/g, бесконечное g означает отсутствие шума"""
    if not g > 0:
        raise MalformedInputError(f"Параметр шума g должен быть положительным, получено {g}")
    return 0.0 if math.isinf(g) else 1.0 / g


@dataclass(frozen=True, eq=False)
class NoiseKernel:
    """
    Гауссово ядро шума, хранится через G^{-1}
    Нулевая матрица соответствует пределу g -> inf
    """

    inverse: np.ndarray

    @classmethod
    def isotropic(cls, g: float, n: int = 1) -> "NoiseKernel":
        """Ядро G = g I"""
        return cls(inverse=inverse_strength(g) * np.eye(2 * n))

    @classmethod
    def from_matrix(cls, G: np.ndarray) -> "NoiseKernel":
        """Ядро по полной положительно определенной матрице G"""
        G = check_positive_definite(G)
        return cls(inverse=np.linalg.inv(G))

    @property
    def n(self) -> int:
        return mode_count(self.inverse)

    def contribution(self) -> np.ndarray:
        """Добавка к корреляционной матрице: -J G^{-1} J"""
        J = sympmat(self.n)
        added = -J @ self.inverse @ J
        return (added + added.T) / 2

    def has_paired_structure(self, tol: float = 1e-9) -> bool:
        """
        G = O^T diag(D_G, D_G) O с ортогональной симплектической O
        Эквивалентно коммутированию G с J
        """
        J = sympmat(self.n)
        scale = max(1.0, float(np.max(np.abs(self.inverse))))
        return bool(np.max(np.abs(self.inverse @ J - J @ self.inverse)) <= tol * scale)


def apply_noise(state: StateLike, kernel: NoiseKernel) -> np.ndarray:
    """Gamma(A) = A - J G^{-1} J"""
    A = as_matrix(state)
    if A.shape != kernel.inverse.shape:
        raise MalformedInputError(
            f"Несовпадение размерностей состояния {A.shape} и ядра {kernel.inverse.shape}"
        )
    return A + kernel.contribution()


def noise_one_mode(params: OneModeParams, g: float) -> OneModeParams:
    """
    Одномодовые законы канала шума

    Gamma(d) = sqrt((s + d m^2)(s + d/m^2)), Gamma(m)^2 = sqrt((s + d m^2)/(s + d/m^2)), s = 1/g

    Args:
        params: Параметры состояния
        g: Параметр шума (inf - без шума)

    Returns:
        Параметры зашумленного состояния, угол не меняется
    """
    s = inverse_strength(g)
    major = s + params.d * params.m ** 2
    minor = s + params.d / params.m ** 2
    return OneModeParams(
        d=float(np.sqrt(major * minor)),
        m=float((major / minor) ** 0.25),
        theta=params.theta,
    )


def classicality_onset(params: OneModeParams, g: float, tol: float = 1e-9) -> bool:
    """Состояние классично после шума: 1/g + d/m^2 >= 1"""
    return inverse_strength(g) + params.d / params.m ** 2 >= 1 - tol


def chi_monotonicity_threshold(params: OneModeParams, tol: float = 1e-9) -> Optional[float]:
    """Критическое 1/g* = m^2/d - d/m^2 или None для классического состояния"""
    if params.d >= params.m ** 2 - tol:
        return None
    return params.m ** 2 / params.d - params.d / params.m ** 2


def chi_monotonicity_sides(params: OneModeParams, g: float) -> Tuple[float, float]:
    """
    Обе части неравенства монотонности chi под шумом

    Returns:
        (Gamma(m) sqrt(Gamma(d)) / (m sqrt(d)), (Gamma(d) + Gamma(m)^2) / (d + m^2))
    """
    noisy = noise_one_mode(params, g)
    d, m = params.d, params.m
    lhs = noisy.m * np.sqrt(noisy.d) / (m * np.sqrt(d))
    rhs = (noisy.d + noisy.m ** 2) / (d + m ** 2)
    return float(lhs), float(rhs)


def chi_after_noise(params: OneModeParams, g: float, tol: float = 1e-9) -> Tuple[float, float]:
    """
    chi зашумленного состояния

    Returns:
        (значение по определению, формула неклассической ветви без проверки классичности)
    """
    noisy = noise_one_mode(params, g)
    raw = 2 / (np.sqrt(noisy.d) / noisy.m + noisy.m / np.sqrt(noisy.d))
    return chi_one_mode(noisy, tol), float(raw)


def locate_chi_crossover(params: OneModeParams, xtol: float = 1e-12) -> Optional[float]:
    """
    Численный поиск 1/g, при котором неравенство монотонности chi меняет знак

    Args:
        params: Неклассическое одномодовое состояние
        xtol: Точность по 1/g

    Returns:
        Точка смены знака или None, если смены нет
    """

    def margin(s: float) -> float:
        lhs, rhs = chi_monotonicity_sides(params, 1.0 / s)
        return lhs - rhs

    grid = np.geomspace(1e-8, 1e8, 321)
    values = [margin(s) for s in grid]
    for k in range(len(grid) - 1):
        if values[k] > 0 >= values[k + 1]:
            return float(brentq(margin, grid[k], grid[k + 1], xtol=xtol, rtol=1e-15))
    return None


def determinant_law(state: StateLike, kernel: NoiseKernel) -> Tuple[float, float]:
    """
    Обе части закона для определителя одномодового канала с парной структурой ядра
    det Gamma(A) = det G^{-1} + Tr G^{-1} Tr A / 2 + det A
    """
    A = as_matrix(state)
    if A.shape != (2, 2):
        raise MalformedInputError("Закон для определителя проверяется для одной моды")
    lhs = float(np.linalg.det(apply_noise(A, kernel)))
    rhs = float(
        np.linalg.det(kernel.inverse)
        + np.trace(kernel.inverse) * np.trace(A) / 2
        + np.linalg.det(A)
    )
    return lhs, rhs


def squeeze_from_thermal(params: OneModeParams, gamma_d: float) -> float:
    """Gamma(m) через Gamma(d): sqrt(X + sqrt(1 + X^2)), X = (m^2 - 1/m^2) / (2 Gamma(d)/d)"""
    X = (params.m ** 2 - params.m ** -2) / (2 * gamma_d / params.d)
    return float(np.sqrt(X + np.sqrt(1 + X * X)))


def recover_inverse_g(params: OneModeParams, gamma_d: float) -> float:
    """
    Восстановление 1/g по (d, m, Gamma(d))
    s = d [-(m^2 + 1/m^2) + sqrt((m^2 - 1/m^2)^2 + 4 (Gamma(d)/d)^2)] / 2
    """
    m2 = params.m ** 2
    ratio = gamma_d / params.d
    return float(params.d * (-(m2 + 1 / m2) + np.sqrt((m2 - 1 / m2) ** 2 + 4 * ratio * ratio)) / 2)


def squeeze_identities(g: float, m: float) -> Dict[str, Tuple[float, float]]:
    """
    Две тождественные формы связи сжатия до и после шума

    Returns:
        {"squeeze_difference": (lhs, rhs), "squeeze_sum": (lhs, rhs)}
    """
    if not (g > 0 and math.isfinite(g)):
        raise MalformedInputError(f"Ожидалось конечное положительное g, получено {g}")
    m2 = m * m
    up, down = 1 + g * m2, 1 + g / m2
    difference = (
        np.sqrt(up / down) - np.sqrt(down / up),
        g * (m2 - 1 / m2) / np.sqrt(up * down),
    )

    s = 1 / g
    major, minor = s + m2, s + 1 / m2
    total = (
        (major + minor) / np.sqrt(major * minor),
        np.sqrt(major / minor) + np.sqrt(minor / major),
    )
    return {
        "squeeze_difference": (float(difference[0]), float(difference[1])),
        "squeeze_sum": (float(total[0]), float(total[1])),
    }


SWEEP_COLUMNS = [
    "d",
    "m",
    "g",
    "gamma_d",
    "gamma_m",
    "classical_after",
    "chi_before",
    "chi_after",
    "phi_before",
    "phi_after",
    "eq64_lhs",
    "eq64_rhs",
]


def sweep_row(d: float, m: float, g: float, tolerances: Optional[Tolerances] = None) -> Dict[str, object]:
    """Одна строка сканирования шума"""
    tolerances = resolve_tolerances(tolerances)
    tol = tolerances.predicate_tol
    params = OneModeParams(d=d, m=m)
    noisy = noise_one_mode(params, g)
    lhs, rhs = chi_monotonicity_sides(params, g)
    return {
        "d": d,
        "m": m,
        "g": g,
        "gamma_d": noisy.d,
        "gamma_m": noisy.m,
        "classical_after": classicality_onset(params, g, tol),
        "chi_before": chi_one_mode(params, tol),
        "chi_after": chi_one_mode(noisy, tol),
        "phi_before": phi_measure_one_mode(params, tol),
        "phi_after": phi_measure_one_mode(noisy, tol),
        "eq64_lhs": lhs,
        "eq64_rhs": rhs,
    }


def grid_points(grid: GridSpec) -> List[Tuple[float, float, float]]:
    """Точки сетки в лексикографическом порядке (d, m, g)"""
    try:
        axes = (grid.d.values(), grid.m.values(), grid.g.values())
    except ValueError as e:
        raise MalformedInputError(f"Некорректная сетка: {e}")
    points = list(product(*axes))
    for d, m, g in points:
        if d < 1 or m < 1 or not g > 0:
            raise MalformedInputError(f"Точка сетки вне области d >= 1, m >= 1, g > 0: {(d, m, g)}")
    return points


def sweep_grid(grid: GridSpec, workers: int = 1, tolerances: Optional[Tolerances] = None) -> List[Dict[str, object]]:
    """
    Сканирование канала шума по сетке

    Строки вычисляются в пуле потоков, порядок вывода совпадает с порядком сетки.

    Args:
        grid: Сетка (d, m, g)
        workers: Число потоков
        tolerances: Допуски

    Returns:
        Список строк со столбцами SWEEP_COLUMNS
    """
    points = grid_points(grid)

    with PerformanceLogger(f"сканирование шума ({len(points)} точек)") as timer:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
            rows = list(executor.map(lambda point: sweep_row(*point, tolerances=tolerances), points))

    violations = 0
    for row in rows:
        if row["phi_after"] < row["phi_before"] - 1e-12:
            violations += 1
            log_finding("phi-monotonicity", f"phi убывает под шумом в точке {row['d'], row['m'], row['g']}")
        if row["eq64_lhs"] < row["eq64_rhs"] - 1e-12:
            logger.debug(f"Неравенство монотонности chi нарушено в точке {row['d'], row['m'], row['g']}")

    log_scan_result("noise", len(rows), violations, timer.duration)
    return rows
