import sys
from pathlib import Path

import numpy as np
import pytest

# Добавляем корневую директорию в путь Python
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from phase_space.states import OneModeParams, one_mode_matrix, random_correlation_matrix  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_state(rng):
    """Фабрика случайных допустимых состояний"""

    def factory(n=1, max_thermal=3.0, max_squeeze=2.0):
        return random_correlation_matrix(n, rng, max_thermal, max_squeeze)

    return factory


@pytest.fixture
def random_params(rng):
    """Фабрика случайных одномодовых параметров в рабочей области"""

    def factory(max_thermal=3.0, max_squeeze=2.0):
        return OneModeParams(
            d=float(rng.uniform(1.0, max_thermal)),
            m=float(rng.uniform(1.0, max_squeeze)),
            theta=float(rng.uniform(0.0, np.pi)),
        )

    return factory


@pytest.fixture
def squeezed_vacuum():
    return one_mode_matrix(1.0, 2.0, 0.0)
