"""
Оракул в усеченном базисе Фока для одной моды
Независимая проверка замкнутых формул прямым вычислением
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.linalg import expm, svdvals

from config.settings import Tolerances, resolve_tolerances
from phase_space.states import OneModeParams
from utils.exceptions import MalformedInputError, NumericalFailureError, TruncationTooSmallError
from utils.logger import PerformanceLogger, logger


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Матрица плотности N x N и потеря следа при усечении"""

    N: int
    rho: np.ndarray
    trace_deficit: float


def annihilation(N: int) -> np.ndarray:
    """Оператор уничтожения a с a|n> = sqrt(n)|n-1>"""
    return np.diag(np.sqrt(np.arange(1, N)), k=1).astype(complex)


def _thermal(K: int, d: float) -> np.ndarray:
    mean = (d - 1) / 2
    if mean <= 0:
        populations = np.zeros(K)
        populations[0] = 1.0
    else:
        ratio = mean / (mean + 1)
        populations = ratio ** np.arange(K) / (mean + 1)
    return np.diag(populations).astype(complex)


def _clip_spectrum(rho: np.ndarray, tolerances: Tolerances) -> np.ndarray:
    # отрицательные собственные значения до -clip обнуляются, след сохраняется
    rho = (rho + rho.conj().T) / 2
    values, vectors = np.linalg.eigh(rho)
    if values[0] < -tolerances.negative_eig_clip:
        raise NumericalFailureError(f"Отрицательное собственное значение {values[0]:.3g}")
    if values[0] >= 0:
        return rho
    trace = float(np.sum(values))
    values = np.clip(values, 0.0, None)
    values *= trace / np.sum(values)
    return (vectors * values) @ vectors.conj().T


def build_one_mode(params: OneModeParams, N: int, tolerances: Optional[Tolerances] = None) -> FockDensityMatrix:
    """
    Сжатое тепловое состояние U_theta U_sq rho_th U_sq^+ U_theta^+

    n = (d - 1)/2, r = ln m, U_sq = exp((r/2)(a^+2 - a^2)), U_theta = exp(i theta a^+ a).
    Вычисление ведется в размерности 2N с последующей обрезкой до N.

    Args:
        params: Параметры (d, m, theta)
        N: Размерность усечения
        tolerances: Допуски

    Returns:
        FockDensityMatrix

    Raises:
        TruncationTooSmallError: потеря следа выше порога
    """
    tolerances = resolve_tolerances(tolerances)
    if N < 2:
        raise MalformedInputError(f"Размерность усечения должна быть не меньше 2, получено {N}")
    if params.d < 1 or params.m < 1:
        raise MalformedInputError(f"Ожидались d >= 1 и m >= 1, получено {params}")

    K = 2 * N
    a = annihilation(K)
    adag = a.conj().T
    r = np.log(params.m)
    squeeze = expm((r / 2) * (adag @ adag - a @ a))
    phase = np.diag(np.exp(1j * params.theta * np.arange(K)))
    U = phase @ squeeze

    rho = (U @ _thermal(K, params.d) @ U.conj().T)[:N, :N]
    deficit = max(0.0, 1.0 - float(np.trace(rho).real))
    if deficit > tolerances.truncation_deficit_cap:
        raise TruncationTooSmallError(
            f"Потеря следа {deficit:.3g} при N={N} выше порога {tolerances.truncation_deficit_cap:.3g}",
            deficit=deficit,
        )

    rho = _clip_spectrum(rho, tolerances)
    logger.debug(f"Построено состояние {params} в базисе Фока N={N}, потеря следа {deficit:.3g}")
    return FockDensityMatrix(N=N, rho=rho, trace_deficit=deficit)


def displacement_cf(state: FockDensityMatrix, u: np.ndarray) -> complex:
    """CF_u = Tr(rho D(alpha)), alpha = (i u1 - u2)/sqrt(2); D строится в размерности 2N"""
    u = np.asarray(u, dtype=float)
    if u.shape != (2,):
        raise MalformedInputError("Оракул работает с одной модой: u должен иметь длину 2")
    K = 2 * state.N
    a = annihilation(K)
    alpha = (1j * u[0] - u[1]) / np.sqrt(2)
    displacement = expm(alpha * a.conj().T - np.conj(alpha) * a)[: state.N, : state.N]
    return complex(np.trace(state.rho @ displacement))


def _psd_sqrt(state: FockDensityMatrix, tolerances: Tolerances) -> np.ndarray:
    values, vectors = np.linalg.eigh(state.rho)
    if values[0] < -tolerances.negative_eig_clip:
        raise NumericalFailureError(f"Отрицательное собственное значение {values[0]:.3g}")
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T


def _same_size(first: FockDensityMatrix, second: FockDensityMatrix):
    if first.N != second.N:
        raise MalformedInputError(f"Несовпадение размерностей усечения: {first.N} и {second.N}")


def oracle_fidelity(
    first: FockDensityMatrix,
    second: FockDensityMatrix,
    tolerances: Optional[Tolerances] = None,
) -> float:
    """Верность Ульмана (сумма сингулярных чисел sqrt(rho1) sqrt(rho2))^2"""
    tolerances = resolve_tolerances(tolerances)
    _same_size(first, second)
    singular = svdvals(_psd_sqrt(first, tolerances) @ _psd_sqrt(second, tolerances))
    return float(np.clip(np.sum(singular) ** 2, 0.0, 1.0))


def oracle_overlap(
    first: FockDensityMatrix,
    second: FockDensityMatrix,
    tolerances: Optional[Tolerances] = None,
) -> float:
    """Перекрытие Холево Tr sqrt(rho1) sqrt(rho2)"""
    tolerances = resolve_tolerances(tolerances)
    _same_size(first, second)
    value = complex(np.trace(_psd_sqrt(first, tolerances) @ _psd_sqrt(second, tolerances)))
    if abs(value.imag) > 1e-8:
        raise NumericalFailureError(f"Мнимая часть перекрытия {value.imag:.3g}")
    return float(np.clip(value.real, 0.0, 1.0))


def oracle_trace_distance(first: FockDensityMatrix, second: FockDensityMatrix) -> float:
    """Сумма модулей собственных значений rho1 - rho2"""
    _same_size(first, second)
    difference = first.rho - second.rho
    return float(np.sum(np.abs(np.linalg.eigvalsh((difference + difference.conj().T) / 2))))


def oracle_trace_sqrt(state: FockDensityMatrix, tolerances: Optional[Tolerances] = None) -> float:
    """Tr sqrt(rho)"""
    tolerances = resolve_tolerances(tolerances)
    values = np.linalg.eigvalsh(state.rho)
    if values[0] < -tolerances.negative_eig_clip:
        raise NumericalFailureError(f"Отрицательное собственное значение {values[0]:.3g}")
    return float(np.sum(np.sqrt(np.clip(values, 0.0, None))))


def mixture(weights: Sequence[float], states: Sequence[FockDensityMatrix]) -> FockDensityMatrix:
    """Выпуклая комбинация sum w_k rho_k"""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(states) or not states:
        raise MalformedInputError("Число весов должно совпадать с числом состояний")
    if np.any(weights < 0) or not np.isclose(np.sum(weights), 1.0):
        raise MalformedInputError("Веса смеси должны быть неотрицательными и давать в сумме 1")
    N = states[0].N
    for state in states:
        if state.N != N:
            raise MalformedInputError("Все состояния смеси должны иметь одну размерность")
    rho = sum(w * state.rho for w, state in zip(weights, states))
    deficit = float(sum(w * state.trace_deficit for w, state in zip(weights, states)))
    return FockDensityMatrix(N=N, rho=rho, trace_deficit=deficit)


def pure_state_reduction(pure: FockDensityMatrix, other: FockDensityMatrix, tol: float = 1e-6) -> float:
    """
    <psi|rho|psi> для чистого первого состояния

    Raises:
        MalformedInputError: первое состояние не чистое
    """
    _same_size(pure, other)
    values, vectors = np.linalg.eigh(pure.rho)
    if values[-1] < 1 - pure.trace_deficit - tol:
        raise MalformedInputError(f"Состояние не чистое: наибольшее собственное значение {values[-1]:.6g}")
    psi = vectors[:, -1]
    return float((psi.conj() @ other.rho @ psi).real)


def truncation_convergence(
    first: OneModeParams,
    second: OneModeParams,
    N: int,
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, float]:
    """Изменение оракульных величин при удвоении N"""
    values = {}
    with PerformanceLogger(f"сходимость усечения N={N} -> {2 * N}"):
        for size in (N, 2 * N):
            r1 = build_one_mode(first, size, tolerances)
            r2 = build_one_mode(second, size, tolerances)
            values[size] = (oracle_fidelity(r1, r2, tolerances), oracle_overlap(r1, r2, tolerances))
    return {
        "fidelity": abs(values[N][0] - values[2 * N][0]),
        "overlap": abs(values[N][1] - values[2 * N][1]),
    }
