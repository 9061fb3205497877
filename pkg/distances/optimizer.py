"""
Численный супремум верности и перекрытия Холево по классическим гауссовым состояниям
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from config.settings import Tolerances, resolve_tolerances
from distances.measures import (
    chi_one_mode,
    chi_pure_multimode,
    fidelity_one_mode,
    holevo_overlap,
    overlap_one_mode,
    phi_measure_one_mode,
)
from phase_space.states import OneModeParams, StateLike, as_matrix, cov_to_params, is_valid, params_to_cov
from phase_space.symplectic import orthogonal_symplectic_generator
from utils.exceptions import InvalidStateError, MalformedInputError
from utils.logger import PerformanceLogger, log_finding, logger


@dataclass
class SupResult:
    """Результат поиска супремума"""

    value: float
    argmax: OneModeParams
    iterations: int
    converged: bool
    analytic: float
    exceeds_analytic: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "argmax": self.argmax.to_dict(),
            "iterations": self.iterations,
            "converged": self.converged,
            "analytic": self.analytic,
            "exceeds_analytic": self.exceeds_analytic,
        }


@dataclass
class LocalMaxCheck:
    """Проверка локальной максимальности вакуума для чистой многомодовой цели"""

    is_local_max: bool
    conjectured_value: float
    best_perturbed_value: float
    trials: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "is_local_max": self.is_local_max,
            "conjectured_value": self.conjectured_value,
            "best_perturbed_value": self.best_perturbed_value,
            "trials": self.trials,
        }


def _wrap_angle(angle: float) -> float:
    """Угол по модулю pi в (-pi/2, pi/2]"""
    wrapped = float(np.mod(angle + np.pi / 2, np.pi) - np.pi / 2)
    return np.pi / 2 if wrapped == -np.pi / 2 else wrapped


class ClassicalSupremumSearch:
    """
    Поиск супремума меры по классическим одномодовым состояниям

    Переменные (d1, m1, delta_theta) проецируются на допустимую область
    d1 >= 1, 1 <= m1 <= sqrt(d1); theta1 = theta_target + delta_theta.
    Грубая сетка и случайные точки задают старты симплекс-метода Нелдера-Мида.
    """

    REFINEMENT_STARTS = 3
    FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)

    def __init__(
        self,
        measure: Callable[[OneModeParams], float],
        target: OneModeParams,
        budget: int = 4000,
        seed: int = 0,
        random_samples: int = 30,
    ):
        if budget < 1:
            raise MalformedInputError(f"Бюджет вычислений должен быть положительным, получено {budget}")
        self.measure = measure
        self.target = target
        self.budget = budget
        self.rng = np.random.default_rng(seed)
        self.random_samples = random_samples
        self.evaluations = 0
        self.d_max = max(4.0, 2 * target.d * target.m ** 2)

    def project(self, x: np.ndarray) -> np.ndarray:
        d = max(float(x[0]), 1.0)
        m = float(np.clip(x[1], 1.0, np.sqrt(d)))
        return np.array([d, m, float(x[2])])

    def candidate(self, x: np.ndarray) -> OneModeParams:
        d, m, delta = self.project(x)
        theta = float(np.mod(self.target.theta + delta, np.pi))
        # theta -> pi снизу соответствует theta = 0
        if np.pi - theta < 1e-9:
            theta = 0.0
        return OneModeParams(d=d, m=m, theta=theta)

    def evaluate(self, x: np.ndarray) -> float:
        self.evaluations += 1
        return self.measure(self.candidate(x))

    def start_points(self) -> List[np.ndarray]:
        """Аналитический кандидат, вакуум, сетка и случайные точки"""
        points = [
            np.array([self.target.d, np.sqrt(self.target.d), 0.0]),
            np.array([1.0, 1.0, 0.0]),
        ]
        for d in np.geomspace(1.0, self.d_max, 9):
            for fraction in self.FRACTIONS:
                m = 1.0 + fraction * (np.sqrt(d) - 1.0)
                for delta in (0.0, np.pi / 2):
                    points.append(np.array([d, m, delta]))
        for _ in range(self.random_samples):
            d = self.rng.uniform(1.0, self.d_max)
            m = 1.0 + self.rng.uniform() * (np.sqrt(d) - 1.0)
            points.append(np.array([d, m, self.rng.uniform(0.0, np.pi)]))
        return points

    def _better(self, first: Tuple[float, np.ndarray], second: Tuple[float, np.ndarray]) -> bool:
        # при равенстве значений предпочитаем меньший |delta_theta|
        if first[0] > second[0] + 1e-12:
            return True
        if first[0] < second[0] - 1e-12:
            return False
        return abs(_wrap_angle(first[1][2])) < abs(_wrap_angle(second[1][2]))

    def run(self) -> Tuple[OneModeParams, bool]:
        """
        Запуск поиска

        Returns:
            (лучшее классическое состояние, признак сходимости)
        """
        scored: List[Tuple[float, np.ndarray]] = []
        for point in self.start_points():
            if self.evaluations >= self.budget:
                break
            scored.append((self.evaluate(point), self.project(point)))

        best = scored[0]
        for item in scored[1:]:
            if self._better(item, best):
                best = item

        remaining = self.budget - self.evaluations
        if remaining <= 0:
            logger.warning("Бюджет исчерпан на грубой сетке, уточнение не выполнялось")
            return self.candidate(best[1]), False

        ranked = sorted(scored, key=lambda item: -item[0])
        starts: List[np.ndarray] = []
        for _, point in ranked:
            if all(np.max(np.abs(point - other)) > 1e-6 for other in starts):
                starts.append(point)
            if len(starts) == self.REFINEMENT_STARTS:
                break

        converged = False
        per_start = max(remaining // len(starts), 1)
        for start in starts:
            if self.evaluations >= self.budget:
                break
            result = minimize(
                lambda x: -self.evaluate(x),
                start,
                method="Nelder-Mead",
                options={
                    "maxfev": min(per_start, self.budget - self.evaluations),
                    "xatol": 1e-10,
                    "fatol": 1e-15,
                },
            )
            item = (-float(result.fun), self.project(result.x))
            if self._better(item, best) or np.allclose(item[1], best[1]):
                best = item
                converged = bool(result.success)

        return self.candidate(best[1]), converged


def _one_mode_target(target: StateLike, tolerances: Tolerances) -> Tuple[np.ndarray, OneModeParams]:
    A = as_matrix(target)
    if A.shape != (2, 2):
        raise MalformedInputError("Поиск супремума реализован для одномодовых состояний")
    if not is_valid(A, tolerances):
        raise InvalidStateError("Целевое состояние недопустимо")
    return A, cov_to_params(A, tolerances)


def _supremum(
    name: str,
    target: StateLike,
    measure: Callable[[OneModeParams, np.ndarray, OneModeParams], float],
    analytic_formula: Callable[[OneModeParams, float], float],
    budget: int,
    seed: int,
    tolerances: Optional[Tolerances],
) -> SupResult:
    tolerances = resolve_tolerances(tolerances)
    A, params = _one_mode_target(target, tolerances)
    analytic = analytic_formula(params, tolerances.predicate_tol)

    if params.d >= params.m ** 2 - tolerances.predicate_tol:
        logger.info(f"Супремум {name}: классическое состояние, значение 1")
        return SupResult(
            value=1.0, argmax=params, iterations=0, converged=True, analytic=1.0, exceeds_analytic=False
        )

    search = ClassicalSupremumSearch(lambda candidate: measure(candidate, A, params), params, budget, seed)
    with PerformanceLogger(f"супремум {name}"):
        argmax, converged = search.run()

    value = measure(argmax, A, params)
    exceeds = value > analytic + 1e-9
    if exceeds:
        log_finding(
            f"sup-{name}",
            f"численный супремум {value:.12g} больше замкнутой формы {analytic:.12g} "
            f"в точке d={argmax.d:.6g}, m={argmax.m:.6g}, theta={argmax.theta:.6g}",
        )
    if not converged:
        logger.warning(f"Супремум {name}: бюджет {budget} исчерпан до сходимости")

    return SupResult(
        value=value,
        argmax=argmax,
        iterations=search.evaluations,
        converged=converged,
        analytic=analytic,
        exceeds_analytic=exceeds,
    )


def sup_fidelity_classical(
    target: StateLike,
    budget: int = 4000,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
) -> SupResult:
    """
    Супремум верности F(rho_cl, rho) по классическим гауссовым состояниям

    Args:
        target: Одномодовое допустимое состояние
        budget: Максимальное число вычислений меры
        seed: Зерно случайных стартов
        tolerances: Допуски

    Returns:
        SupResult с аналитическим значением на классическом кандидате
    """
    return _supremum(
        "fidelity",
        target,
        lambda candidate, A, _: fidelity_one_mode(params_to_cov(candidate), A),
        phi_measure_one_mode,
        budget,
        seed,
        tolerances,
    )


def sup_overlap_classical(
    target: StateLike,
    budget: int = 4000,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
) -> SupResult:
    """Супремум перекрытия Холево по классическим гауссовым состояниям"""
    return _supremum(
        "overlap",
        target,
        lambda candidate, _, params: overlap_one_mode(candidate, params),
        chi_one_mode,
        budget,
        seed,
        tolerances,
    )


def local_max_check_multimode(
    squeezes,
    scale: float = 1e-2,
    trials: int = 50,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
) -> LocalMaxCheck:
    """
    Проверка, что вакуум - локальный максимум перекрытия с чистым сжатым состоянием

    Цель diag(M^2, M^-2). Возмущения: D1 = 1 + eps u, M1 = min(1 + eps w, sqrt(D1)),
    поворот O = expm(eps * [[X, Y], [-Y, X]]).

    Args:
        squeezes: Сжатия m_k >= 1
        scale: Масштаб возмущений eps
        trials: Число случайных возмущений
        seed: Зерно генератора

    Returns:
        LocalMaxCheck
    """
    squeezes = np.asarray(squeezes, dtype=float)
    if squeezes.ndim != 1 or squeezes.size == 0 or np.any(squeezes < 1):
        raise MalformedInputError("Ожидался непустой список сжатий m_k >= 1")

    n = squeezes.size
    rng = np.random.default_rng(seed)
    target = np.diag(np.concatenate([squeezes ** 2, squeezes ** -2]))
    conjectured = chi_pure_multimode(squeezes)

    best = -np.inf
    for _ in range(trials):
        D1 = 1 + scale * rng.uniform(size=n)
        M1 = np.minimum(1 + scale * rng.uniform(size=n), np.sqrt(D1))
        X = rng.normal(size=(n, n))
        Y = rng.normal(size=(n, n))
        O = expm(scale * orthogonal_symplectic_generator((X - X.T) / 2, (Y + Y.T) / 2))
        A1 = O.T @ np.diag(np.concatenate([D1 * M1 ** 2, D1 / M1 ** 2])) @ O
        best = max(best, holevo_overlap((A1 + A1.T) / 2, target, tolerances))

    is_local_max = bool(best <= conjectured + 1e-12)
    if not is_local_max:
        log_finding(
            "multimode-chi",
            f"вакуум не локальный максимум для M={squeezes.tolist()}: {best:.12g} > {conjectured:.12g}",
        )
    return LocalMaxCheck(
        is_local_max=is_local_max,
        conjectured_value=conjectured,
        best_perturbed_value=float(best),
        trials=trials,
    )
