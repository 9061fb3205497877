"""
Квадратный корень гауссовой матрицы плотности
sqrt(rho) имеет CF вида K * exp(-1/4 u^T phi(A) u), phi(A) - J phi(A)^{-1} J = 2A
"""

from typing import Optional

import numpy as np

from config.settings import Tolerances, resolve_tolerances
from phase_space.operator_cf import GaussianOperatorCF
from phase_space.states import StateLike, as_matrix
from phase_space.symplectic import mode_count, principal_sqrt, symplectic_spectrum, sympmat, williamson
from utils.exceptions import InvalidStateError


def phi_scalar(d: float) -> float:
    """phi(d) = d + sqrt(d^2 - 1)"""
    return float(d + np.sqrt(max(d * d - 1.0, 0.0)))


def _checked_spectrum(spectrum: np.ndarray, tolerances: Tolerances) -> np.ndarray:
    if spectrum[-1] < 1 - tolerances.predicate_tol:
        raise InvalidStateError(
            f"Симплектическое собственное значение {spectrum[-1]:.12g} < 1: корень не определен"
        )
    return np.maximum(spectrum, 1.0)


def _excess(spectrum: np.ndarray, tolerances: Tolerances) -> np.ndarray:
    # sqrt(d^2 - 1) с обнулением почти чистых мод
    excess = np.sqrt(np.maximum(spectrum ** 2 - 1.0, 0.0))
    excess[spectrum <= 1 + tolerances.pure_clamp] = 0.0
    return excess


def phi_of(state: StateLike, tolerances: Optional[Tolerances] = None) -> np.ndarray:
    """
    Матрица phi(A) = S^T (D + sqrt(D^2 - I)) S через разложение Вильямсона

    Args:
        state: Допустимое состояние
        tolerances: Допуски

    Returns:
        Симметричная положительно определенная матрица phi(A)

    Raises:
        InvalidStateError: есть d_k < 1
    """
    tolerances = resolve_tolerances(tolerances)
    A = as_matrix(state)
    decomposition = williamson(A, tolerances)
    spectrum = _checked_spectrum(decomposition.spectrum, tolerances)
    excess = _excess(spectrum, tolerances)

    if not np.any(excess):
        return A.copy()

    S = decomposition.S
    phi = A + S.T @ np.diag(np.concatenate([excess, excess])) @ S
    return (phi + phi.T) / 2


def phi_closed_form(state: StateLike) -> np.ndarray:
    """
    phi(A) = A (I + sqrt(I + (JA)^{-2})) через главный корень матрицы
    Используется только для перекрестной проверки
    """
    A = as_matrix(state)
    J = sympmat(mode_count(A))
    JA = J @ A
    inner = np.eye(A.shape[0]) + np.linalg.inv(JA @ JA)
    phi = A @ (np.eye(A.shape[0]) + principal_sqrt(inner))
    phi = np.real_if_close(phi, tol=1e6)
    return (phi + phi.T) / 2


def fixed_point_residual(state: StateLike, phi: np.ndarray) -> float:
    """||phi - J phi^{-1} J - 2A||_max"""
    A = as_matrix(state)
    J = sympmat(mode_count(A))
    return float(np.max(np.abs(phi - J @ np.linalg.inv(phi) @ J - 2 * A)))


def det_phi(state: StateLike, tolerances: Optional[Tolerances] = None) -> float:
    """det phi(A) = prod (d_k + sqrt(d_k^2 - 1))^2 по симплектическому спектру"""
    tolerances = resolve_tolerances(tolerances)
    spectrum = _checked_spectrum(symplectic_spectrum(as_matrix(state), tolerances), tolerances)
    return float(np.prod((spectrum + _excess(spectrum, tolerances)) ** 2))


def sqrt_cf(state: StateLike, tolerances: Optional[Tolerances] = None) -> GaussianOperatorCF:
    """Характеристическая функция sqrt(rho): K = det phi(A)^{1/4}, форма phi(A)"""
    tolerances = resolve_tolerances(tolerances)
    return GaussianOperatorCF(
        scale=det_phi(state, tolerances) ** 0.25,
        form=phi_of(state, tolerances),
    )


def trace_sqrt(state: StateLike, tolerances: Optional[Tolerances] = None) -> float:
    """Tr sqrt(rho)"""
    return det_phi(state, tolerances) ** 0.25
