"""
Меры близости гауссовых состояний и меры неклассичности
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from config.settings import Tolerances, resolve_tolerances
from phase_space.operator_cf import GaussianOperatorCF
from phase_space.sqrt_map import det_phi, phi_of, phi_scalar, sqrt_cf
from phase_space.states import (
    OneModeParams,
    StateLike,
    as_matrix,
    cov_to_params,
    is_valid,
    params_to_cov,
)
from phase_space.symplectic import mode_count, symplectic_spectrum
from utils.exceptions import InvalidStateError, MalformedInputError, NumericalFailureError
from utils.logger import log_finding, log_measure, logger


class BoundKind(Enum):
    """Тип величины, по которой оценивается расстояние по следовой норме"""

    FIDELITY = "fidelity"
    OVERLAP = "overlap"


MEASURE_NAMES = ("fidelity", "holevo", "chi", "phi")


def _validated_pair(first: StateLike, second: StateLike, tolerances: Tolerances) -> Tuple[np.ndarray, np.ndarray]:
    A1, A2 = as_matrix(first), as_matrix(second)
    if A1.shape != A2.shape:
        raise MalformedInputError(f"Несовпадение размерностей: {A1.shape} и {A2.shape}")
    for A in (A1, A2):
        if not is_valid(A, tolerances):
            raise InvalidStateError("Матрица не задает допустимое состояние")
    return A1, A2


def _is_classical_params(params: OneModeParams, tol: float) -> bool:
    return params.d >= params.m ** 2 - tol


def holevo_overlap(first: StateLike, second: StateLike, tolerances: Optional[Tolerances] = None) -> float:
    """
    Перекрытие Холево Tr sqrt(rho1) sqrt(rho2)

    sqrt( sqrt(det phi1 det phi2) / det((phi1 + phi2)/2) )

    Args:
        first: Первое состояние
        second: Второе состояние
        tolerances: Допуски

    Returns:
        Значение в (0, 1]
    """
    tolerances = resolve_tolerances(tolerances)
    A1, A2 = _validated_pair(first, second, tolerances)
    phi1, phi2 = phi_of(A1, tolerances), phi_of(A2, tolerances)
    numerator = np.sqrt(det_phi(A1, tolerances) * det_phi(A2, tolerances))
    value = float(np.sqrt(numerator / np.linalg.det((phi1 + phi2) / 2)))
    return min(value, 1.0)


def squeeze_mismatch(delta_theta: float, m1: float, m2: float) -> float:
    """
    Функция F(delta_theta, m1, m2) рассогласования сжатий
    F = 4 при совпадающих сжатиях
    """
    s2 = np.sin(delta_theta) ** 2
    c2 = np.cos(delta_theta) ** 2
    product = (m1 * m2) ** 2
    ratio = (m1 / m2) ** 2
    return float(2 + s2 * (product + 1 / product) + c2 * (ratio + 1 / ratio))


def overlap_one_mode(first: OneModeParams, second: OneModeParams) -> float:
    """Перекрытие Холево одномодовых состояний: 2 / sqrt(H)"""
    for params in (first, second):
        if params.d < 1 or params.m <= 0:
            raise InvalidStateError(f"Недопустимые параметры состояния: {params}")
    phi1, phi2 = phi_scalar(first.d), phi_scalar(second.d)
    H = (phi1 - phi2) ** 2 / (phi1 * phi2) + squeeze_mismatch(first.theta - second.theta, first.m, second.m)
    return min(float(2 / np.sqrt(H)), 1.0)


def chi_one_mode(params: OneModeParams, tol: float = 1e-9) -> float:
    """chi = 2 / (sqrt(d)/m + m/sqrt(d)), для классических состояний 1"""
    if _is_classical_params(params, tol):
        return 1.0
    root_d = np.sqrt(params.d)
    return float(2 / (root_d / params.m + params.m / root_d))


def chi_pure_multimode(squeezes) -> float:
    """chi для чистого многомодового сжатого состояния: prod 2 / (m_k + 1/m_k)"""
    squeezes = np.asarray(squeezes, dtype=float)
    if squeezes.ndim != 1 or squeezes.size == 0 or np.any(squeezes <= 0):
        raise MalformedInputError("Ожидался непустой список положительных сжатий")
    return float(np.prod(2 / (squeezes + 1 / squeezes)))


def fidelity(first: StateLike, second: StateLike, tolerances: Optional[Tolerances] = None) -> float:
    """
    Верность Ульмана [Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2 для любого числа мод

    Оператор sqrt(rho1) rho2 sqrt(rho1) гауссов с множителем sqrt(L),
    L = 1 / det((A1 + A2)/2), и вещественной формой O; тогда
    F = sqrt(L) * prod(nu_k + sqrt(nu_k^2 - 1)) по симплектическому спектру O.

    Raises:
        NumericalFailureError: мнимый остаток выше допуска
    """
    tolerances = resolve_tolerances(tolerances)
    A1, A2 = _validated_pair(first, second, tolerances)

    root = sqrt_cf(A1, tolerances)
    sandwich = root.compose(GaussianOperatorCF.density(A2)).compose(root)

    form = sandwich.real_form(tolerances.fidelity_imag_residue)
    scale = sandwich.real_scale(tolerances.fidelity_imag_residue)

    L = 1.0 / np.linalg.det((A1 + A2) / 2)
    if abs(scale ** 2 - L) > 1e-8 * max(1.0, L):
        raise NumericalFailureError(f"Несогласованный след произведения: {scale ** 2:.12g} != {L:.12g}")

    spectrum = np.maximum(symplectic_spectrum(form, tolerances), 1.0)
    value = float(np.sqrt(L) * np.prod(spectrum + np.sqrt(spectrum ** 2 - 1)))
    log_measure("fidelity", value, f"{mode_count(A1)} мод")
    return min(value, 1.0)


def fidelity_one_mode(first: StateLike, second: StateLike) -> float:
    """
    Верность одномодовых состояний в замкнутой форме

    F = 2 / (sqrt(det(A1 + A2) + P) - sqrt(P)), P = (det A1 - 1)(det A2 - 1)
    """
    A1, A2 = as_matrix(first), as_matrix(second)
    if A1.shape != (2, 2) or A2.shape != (2, 2):
        raise MalformedInputError("Замкнутая форма верности определена только для одной моды")
    P = max((np.linalg.det(A1) - 1) * (np.linalg.det(A2) - 1), 0.0)
    value = 2 / (np.sqrt(np.linalg.det(A1 + A2) + P) - np.sqrt(P))
    return min(float(value), 1.0)


def fidelity_one_mode_params(first: OneModeParams, second: OneModeParams) -> float:
    """Верность через параметры (d, m, theta) и функцию рассогласования сжатий"""
    d1, d2 = first.d, second.d
    mismatch = squeeze_mismatch(first.theta - second.theta, first.m, second.m)
    total = d1 * d1 * d2 * d2 + 1 + d1 * d2 * (mismatch - 2)
    P = max((d1 * d1 - 1) * (d2 * d2 - 1), 0.0)
    return min(float(2 / (np.sqrt(total) - np.sqrt(P))), 1.0)


def phi_measure_one_mode(params: OneModeParams, tol: float = 1e-9) -> float:
    """
    Мера phi(rho) = sup по классическим состояниям верности
    Для неклассических состояний (sqrt(d) < m) значение на семействе d1 = d, m1 = sqrt(d)
    """
    if _is_classical_params(params, tol):
        return 1.0
    d, m = params.d, params.m
    excess = d * d - 1
    balance = np.sqrt(d) / m + m / np.sqrt(d)
    return float(2 / (np.sqrt(excess ** 2 + d * d * balance ** 2) - excess))


def analytic_candidate(params: OneModeParams) -> OneModeParams:
    """Классический кандидат d1 = d, m1 = sqrt(d), theta1 = theta"""
    return OneModeParams(d=params.d, m=float(np.sqrt(params.d)), theta=params.theta)


def fidelity_analytic_family(params: OneModeParams) -> float:
    """Верность между состоянием и классическим кандидатом"""
    candidate = analytic_candidate(params)
    return fidelity_one_mode(params_to_cov(candidate), params_to_cov(params))


def overlap_analytic_family(params: OneModeParams) -> float:
    """Перекрытие Холево между состоянием и классическим кандидатом"""
    return overlap_one_mode(analytic_candidate(params), params)


def delta_bounds(value: float, kind) -> Tuple[float, float]:
    """
    Границы расстояния по следовой норме

    Args:
        value: Верность F или перекрытие h в (0, 1]
        kind: BoundKind или строка "fidelity" / "overlap"

    Returns:
        (нижняя, верхняя) граница
    """
    try:
        kind = BoundKind(kind) if not isinstance(kind, BoundKind) else kind
    except ValueError:
        raise MalformedInputError(f"Неизвестный тип границ: {kind}")
    if not 0 < value <= 1 + 1e-12:
        raise MalformedInputError(f"Значение меры вне (0, 1]: {value}")
    value = min(float(value), 1.0)

    if kind is BoundKind.FIDELITY:
        return 2 * (1 - np.sqrt(value)), 2 * np.sqrt(1 - value)
    return 2 * (1 - value), 2 * np.sqrt(1 - value * value)


def ordering_gap(first: StateLike, second: StateLike, tolerances: Optional[Tolerances] = None) -> float:
    """F - h^2 (ожидается неотрицательным, нарушения фиксируются в логе)"""
    gap = fidelity(first, second, tolerances) - holevo_overlap(first, second, tolerances) ** 2
    if gap < -1e-12:
        log_finding("ordering", f"F - h^2 = {gap:.3g} < 0")
    return gap


@dataclass
class MeasureReport:
    """Отчет по мерам для одного или двух состояний"""

    fidelity: Optional[float] = None
    holevo_overlap: Optional[float] = None
    chi: Optional[float] = None
    phi_measure: Optional[float] = None
    delta_bounds_fidelity: Optional[Tuple[float, float]] = None
    delta_bounds_overlap: Optional[Tuple[float, float]] = None
    extras: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        """Поля с вычисленными значениями, в фиксированном порядке"""
        items = {
            "fidelity": self.fidelity,
            "holevo": self.holevo_overlap,
            "chi": self.chi,
            "phi": self.phi_measure,
            "delta_bounds_fidelity": list(self.delta_bounds_fidelity) if self.delta_bounds_fidelity else None,
            "delta_bounds_overlap": list(self.delta_bounds_overlap) if self.delta_bounds_overlap else None,
        }
        report = {key: value for key, value in items.items() if value is not None}
        report.update(self.extras)
        return report


def measure_report(
    state: StateLike,
    second: Optional[StateLike] = None,
    which: str = "all",
    tolerances: Optional[Tolerances] = None,
) -> MeasureReport:
    """
    Сводный отчет по мерам

    С одним состоянием вычисляются меры неклассичности chi и phi (одна мода),
    с двумя - верность и перекрытие Холево. Границы расстояния по следовой норме
    считаются по каждой вычисленной величине.

    Args:
        state: Первое состояние
        second: Второе состояние (необязательно)
        which: all | fidelity | holevo | chi | phi
        tolerances: Допуски

    Returns:
        MeasureReport
    """
    tolerances = resolve_tolerances(tolerances)
    if which != "all" and which not in MEASURE_NAMES:
        raise MalformedInputError(f"Неизвестная мера '{which}', допустимо: all, {', '.join(MEASURE_NAMES)}")

    def wanted(name: str) -> bool:
        return which in ("all", name)

    report = MeasureReport()

    if second is None:
        if which in ("fidelity", "holevo"):
            raise MalformedInputError(f"Для меры '{which}' нужно второе состояние")
        A = as_matrix(state)
        if not is_valid(A, tolerances):
            raise InvalidStateError("Матрица не задает допустимое состояние")
        if A.shape != (2, 2):
            raise MalformedInputError("Меры chi и phi вычисляются только для одной моды")
        params = cov_to_params(A, tolerances)
        if wanted("chi"):
            report.chi = chi_one_mode(params, tolerances.predicate_tol)
            report.delta_bounds_overlap = delta_bounds(report.chi, BoundKind.OVERLAP)
        if wanted("phi"):
            report.phi_measure = phi_measure_one_mode(params, tolerances.predicate_tol)
            report.delta_bounds_fidelity = delta_bounds(report.phi_measure, BoundKind.FIDELITY)
        logger.info(f"Меры неклассичности: chi={report.chi}, phi={report.phi_measure}")
        return report

    if which in ("chi", "phi"):
        raise MalformedInputError(f"Мера '{which}' определена для одного состояния")
    if wanted("fidelity"):
        report.fidelity = fidelity(state, second, tolerances)
        report.delta_bounds_fidelity = delta_bounds(report.fidelity, BoundKind.FIDELITY)
    if wanted("holevo"):
        report.holevo_overlap = holevo_overlap(state, second, tolerances)
        report.delta_bounds_overlap = delta_bounds(report.holevo_overlap, BoundKind.OVERLAP)
    if report.fidelity is not None and report.holevo_overlap is not None:
        gap = report.fidelity - report.holevo_overlap ** 2
        if gap < -1e-12:
            log_finding("ordering", f"F - h^2 = {gap:.3g} < 0")
    logger.info(f"Меры близости: F={report.fidelity}, h={report.holevo_overlap}")
    return report


__all__ = [
    "BoundKind",
    "MeasureReport",
    "analytic_candidate",
    "chi_one_mode",
    "chi_pure_multimode",
    "delta_bounds",
    "fidelity",
    "fidelity_analytic_family",
    "fidelity_one_mode",
    "fidelity_one_mode_params",
    "holevo_overlap",
    "measure_report",
    "ordering_gap",
    "overlap_analytic_family",
    "overlap_one_mode",
    "phi_measure_one_mode",
    "squeeze_mismatch",
]
