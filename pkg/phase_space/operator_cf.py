"""
Гауссовы операторы в виде характеристической функции
CF_u(B) = K * exp(-1/4 u^T M u)
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from phase_space.symplectic import mode_count, sympmat
from utils.exceptions import MalformedInputError, NumericalFailureError


@dataclass(frozen=True)
class GaussianOperatorCF:
    """
    Ненормированный гауссов оператор: множитель K и матрица квадратичной формы

    Для матриц плотности K = 1, а форма - корреляционная матрица.
    Промежуточные произведения имеют комплексно-симметричную форму.
    """

    scale: Union[float, complex]
    form: np.ndarray

    @property
    def n(self) -> int:
        return mode_count(self.form)

    @classmethod
    def density(cls, A: np.ndarray) -> "GaussianOperatorCF":
        """Характеристическая функция состояния с корреляционной матрицей A"""
        return cls(scale=1.0, form=np.asarray(A, dtype=float))

    def evaluate(self, u: np.ndarray) -> Union[float, complex]:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.form.shape[0],):
            raise MalformedInputError(
                f"Вектор u должен иметь длину {self.form.shape[0]}, получено {u.shape}"
            )
        value = self.scale * np.exp(-0.25 * (u @ self.form @ u))
        return _maybe_real(value)

    def trace(self) -> Union[float, complex]:
        """След оператора (значение CF в нуле)"""
        return _maybe_real(self.scale)

    def compose(self, other: "GaussianOperatorCF") -> "GaussianOperatorCF":
        """
        Характеристическая функция произведения операторов self * other

        Args:
            other: Правый множитель

        Returns:
            GaussianOperatorCF произведения
        """
        if self.form.shape != other.form.shape:
            raise MalformedInputError(
                f"Несовпадение размерностей: {self.form.shape} и {other.form.shape}"
            )
        J = sympmat(self.n)
        M1, M2 = self.form, other.form
        total = M1 + M2

        det_half = np.linalg.det(total / 2)
        if abs(det_half) == 0:
            raise NumericalFailureError("Вырожденная сумма квадратичных форм")
        scale = self.scale * other.scale / np.sqrt(complex(det_half))

        form = M2 - (M2 - 1j * J) @ np.linalg.solve(total, M2 + 1j * J)
        form = (form + form.T) / 2

        return GaussianOperatorCF(scale=_maybe_real(scale), form=_maybe_real_matrix(form))

    def real_form(self, tol: float = 1e-10) -> np.ndarray:
        """
        Вещественная симметричная часть формы

        Raises:
            NumericalFailureError: мнимая часть выше допуска
        """
        form = np.asarray(self.form)
        if np.iscomplexobj(form):
            residue = float(np.max(np.abs(form.imag)))
            if residue > tol * max(1.0, float(np.max(np.abs(form.real)))):
                raise NumericalFailureError(f"Мнимый остаток квадратичной формы: {residue:.3g}")
            form = form.real
        return (form + form.T) / 2

    def real_scale(self, tol: float = 1e-10) -> float:
        scale = complex(self.scale)
        if abs(scale.imag) > tol * max(1.0, abs(scale.real)):
            raise NumericalFailureError(f"Мнимый остаток множителя: {scale.imag:.3g}")
        return scale.real


def _maybe_real(value):
    value = complex(value)
    if value.imag == 0.0:
        return value.real
    return value


def _maybe_real_matrix(matrix: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(matrix) and not np.any(matrix.imag):
        return matrix.real
    return matrix
