#!/usr/bin/env python3
"""
Меры неклассичности гауссовых состояний
Точка входа командной строки
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Добавляем корневую директорию в путь Python
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from cli.commands import CommandRunner
from config.settings import load_run_config
from utils.exceptions import GaussNCError
from utils.logger import logger

COMMANDS = ("classify", "measure", "sweep", "optimize", "oracle-compare")

HELP_EPILOG = """
ПРИМЕРЫ:
    python main.py classify --input vacuum.json
    python main.py measure --input squeezed.json
    python main.py measure --input vacuum.json --second thermal.json --which fidelity
    python main.py sweep --grid "d=1:3:21,m=2:3:11,g=1:4:4" --out sweep.csv
    python main.py optimize --input squeezed.json --budget 4000 --seed 0
    python main.py oracle-compare --input vacuum.json --second thermal.json --trunc 80

ФОРМАТ СОСТОЯНИЯ:
    {"modes": 1, "A": [[4, 0], [0, 1]]} или {"one_mode": {"d": 1, "m": 2, "theta": 0}}

КОДЫ ЗАВЕРШЕНИЯ:
    0 успех, 1 численная ошибка или расхождение с оракулом,
    2 некорректный ввод, 3 недопустимое состояние, 4 слишком малое усечение
"""


def build_parser() -> argparse.ArgumentParser:
    """Парсер аргументов командной строки"""
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Меры неклассичности гауссовых состояний: верность, перекрытие Холево, канал шума",
        epilog=HELP_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS, help="Команда")
    parser.add_argument("--input", help="JSON файл состояния")
    parser.add_argument("--second", help="JSON файл второго состояния")
    parser.add_argument("--which", help="all | fidelity | holevo | chi | phi")
    parser.add_argument("--grid", help='Сетка "d=start:stop:count,m=...,g=..." (g допускает inf)')
    parser.add_argument("--trunc", type=int, help="Размерность усечения базиса Фока")
    parser.add_argument("--seed", type=int, help="Зерно генератора случайных чисел")
    parser.add_argument("--budget", type=int, help="Бюджет вычислений оптимизатора")
    parser.add_argument("--workers", type=int, help="Число потоков сканирования")
    parser.add_argument("--tol", type=float, help="Допуск предикатов")
    parser.add_argument("--out", help="Файл результата (по умолчанию stdout)")
    parser.add_argument("--format", choices=("json", "csv"), help="Формат вывода (csv только для sweep)")
    parser.add_argument("--config", help="JSON файл конфигурации")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Главная функция"""
    args = build_parser().parse_args(argv)

    overrides = {
        "command": args.command,
        "input": args.input,
        "second": args.second,
        "which": args.which,
        "grid": args.grid,
        "trunc": args.trunc,
        "seed": args.seed,
        "budget": args.budget,
        "workers": args.workers,
        "out": args.out,
        "format": args.format,
        "tolerances": {"predicate_tol": args.tol} if args.tol is not None else None,
    }

    try:
        config = load_run_config(args.config, overrides)
    except GaussNCError as e:
        logger.error(f"❌ {e}")
        return e.exit_code

    output = CommandRunner(config).run()
    if output.text and not config.out:
        sys.stdout.write(output.text)
        sys.stdout.flush()
    return output.exit_code


if __name__ == "__main__":
    sys.exit(main())
