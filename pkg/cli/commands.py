"""
Команды командной строки
Каждая команда возвращает текст для stdout и код завершения
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from config.settings import RunConfig
from distances.measures import fidelity_one_mode, holevo_overlap, measure_report
from distances.noise import SWEEP_COLUMNS, sweep_grid
from distances.optimizer import sup_fidelity_classical, sup_overlap_classical
from oracle.fock_oracle import (
    build_one_mode,
    oracle_fidelity,
    oracle_overlap,
    oracle_trace_sqrt,
)
from phase_space.sqrt_map import trace_sqrt
from phase_space.states import StateClass, classify, cov_to_params, is_valid, load_state
from phase_space.symplectic import symplectic_spectrum
from utils.exceptions import GaussNCError, InvalidStateError, MalformedInputError
from utils.logger import PerformanceLogger, log_oracle_comparison, logger
from utils.serialization import to_csv, to_json


DIFF_RESOLUTION = 1e-12


@dataclass
class CommandOutput:
    """Результат команды"""

    text: str
    exit_code: int = 0


class CommandRunner:
    """Выполнение команд по конфигурации запуска"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.tolerances = config.tolerances
        self.commands: Dict[str, Callable[[], CommandOutput]] = {
            "classify": self.cmd_classify,
            "measure": self.cmd_measure,
            "sweep": self.cmd_sweep,
            "optimize": self.cmd_optimize,
            "oracle-compare": self.cmd_oracle_compare,
        }

    def run(self) -> CommandOutput:
        """
        Запуск команды из конфигурации

        Returns:
            CommandOutput; ошибки библиотеки превращаются в код завершения
        """
        logger.info(f"▶️ Команда {self.config.command}")
        try:
            output = self.commands[self.config.command]()
        except GaussNCError as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            return CommandOutput(text="", exit_code=e.exit_code)

        self.write(output)
        return output

    def write(self, output: CommandOutput):
        """Запись результата в файл, если задан --out"""
        if self.config.out and output.text:
            Path(self.config.out).write_text(output.text, encoding="utf-8", newline="\n")
            logger.info(f"💾 Результат записан в {self.config.out}")

    def _input(self) -> np.ndarray:
        if not self.config.input:
            raise MalformedInputError("Не задан входной файл состояния (--input)")
        return load_state(self.config.input)

    def _second(self) -> Optional[np.ndarray]:
        return load_state(self.config.second) if self.config.second else None

    def _format(self, default: str) -> str:
        return self.config.format or default

    def cmd_classify(self) -> CommandOutput:
        """Класс состояния, симплектический спектр и параметры (d, m, theta)"""
        A = self._input()
        state_class = classify(A, self.tolerances)

        report: Dict[str, object] = {"class": state_class.value}
        try:
            report["symplectic_spectrum"] = symplectic_spectrum(A, self.tolerances)
        except InvalidStateError:
            report["symplectic_spectrum"] = None

        if state_class is StateClass.INVALID:
            logger.warning("⚠️ Состояние недопустимо")
            return CommandOutput(text=to_json(report), exit_code=InvalidStateError.exit_code)

        if A.shape == (2, 2):
            report.update(cov_to_params(A, self.tolerances).to_dict())
        return CommandOutput(text=to_json(report))

    def cmd_measure(self) -> CommandOutput:
        """Отчет по мерам для одного или двух состояний"""
        report = measure_report(self._input(), self._second(), self.config.which, self.tolerances)
        return CommandOutput(text=to_json(report.to_dict()))

    def cmd_sweep(self) -> CommandOutput:
        """Сканирование канала шума по сетке (d, m, g)"""
        if self.config.grid is None:
            raise MalformedInputError("Не задана сетка (--grid)")
        rows = sweep_grid(self.config.grid, self.config.workers, self.tolerances)

        if self._format("csv") == "json":
            return CommandOutput(text=to_json({"columns": SWEEP_COLUMNS, "rows": rows}))
        return CommandOutput(text=to_csv(SWEEP_COLUMNS, ([row[key] for key in SWEEP_COLUMNS] for row in rows)))

    def cmd_optimize(self) -> CommandOutput:
        """Численные супремумы верности и перекрытия по классическим состояниям"""
        A = self._input()
        which = self.config.which
        if which not in ("all", "fidelity", "holevo"):
            raise MalformedInputError(f"Для optimize допустимо --which all|fidelity|holevo, получено '{which}'")

        report: Dict[str, object] = {}
        if which in ("all", "fidelity"):
            report["fidelity"] = sup_fidelity_classical(
                A, self.config.budget, self.config.seed, self.tolerances
            ).to_dict()
        if which in ("all", "holevo"):
            report["overlap"] = sup_overlap_classical(
                A, self.config.budget, self.config.seed, self.tolerances
            ).to_dict()
        return CommandOutput(text=to_json(report))

    def cmd_oracle_compare(self) -> CommandOutput:
        """Сравнение замкнутых формул с оракулом в базисе Фока"""
        first = self._input()
        second = self._second()
        N = self.config.trunc
        tolerance = self.tolerances.oracle_tolerance

        for A in (first, second):
            if A is None:
                continue
            if A.shape != (2, 2):
                raise MalformedInputError("Оракул поддерживает только одномодовые состояния")
            if not is_valid(A, self.tolerances):
                raise InvalidStateError("Состояние недопустимо")

        with PerformanceLogger(f"оракул N={N}"):
            r1 = build_one_mode(cov_to_params(first, self.tolerances), N, self.tolerances)
            comparisons: Dict[str, Dict[str, float]] = {}
            if second is None:
                comparisons["trace_sqrt"] = self._compare(
                    trace_sqrt(first, self.tolerances), oracle_trace_sqrt(r1, self.tolerances)
                )
            else:
                r2 = build_one_mode(cov_to_params(second, self.tolerances), N, self.tolerances)
                comparisons["fidelity"] = self._compare(
                    fidelity_one_mode(first, second), oracle_fidelity(r1, r2, self.tolerances)
                )
                comparisons["holevo"] = self._compare(
                    holevo_overlap(first, second, self.tolerances), oracle_overlap(r1, r2, self.tolerances)
                )

        for name, item in comparisons.items():
            log_oracle_comparison(name, item["analytic"], item["oracle"], tolerance)

        within = all(item["abs_diff"] <= tolerance for item in comparisons.values())
        report = {"trunc": N, "tolerance": tolerance, "measures": comparisons, "within_tolerance": within}
        return CommandOutput(text=to_json(report), exit_code=0 if within else 1)

    @staticmethod
    def _compare(analytic: float, oracle: float) -> Dict[str, float]:
        diff = abs(analytic - oracle)
        # разности ниже разрешения 12 значащих цифр печатаются как 0
        if diff < DIFF_RESOLUTION:
            diff = 0.0
        return {"analytic": analytic, "oracle": oracle, "abs_diff": diff}
