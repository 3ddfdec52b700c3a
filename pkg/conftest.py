"""공용 테스트 픽스처"""

import numpy as np
import pytest

from gate_robustness.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z
from gate_robustness.models import Controller, UncertaintyStructure
from gate_robustness.problems import ProblemSpec, build_problem


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow", action="store_true", default=False, help="desk-scale 연구 테스트 실행"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="--run-slow 옵션이 필요합니다")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_hermitian():
    def _make(rng: np.random.Generator, dim: int) -> np.ndarray:
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        return (a + a.conj().T) / 2

    return _make


@pytest.fixture
def rotation_spec():
    """드리프트 없는 단일 큐비트, 제어 σ_x/2, 목표 I"""
    return ProblemSpec(
        n_qubits=1,
        drift=np.zeros((2, 2), dtype=complex),
        controls=(0.5 * SIGMA_X,),
        target=np.eye(2, dtype=complex),
    )


@pytest.fixture
def rotation_structure():
    """제어 슬롯에만 σ_x/√2 를 둔 구조"""
    structures = np.zeros((2, 2, 2), dtype=complex)
    structures[1] = SIGMA_X / np.sqrt(2.0)
    return UncertaintyStructure(structures, (False, True))


@pytest.fixture
def qubit_spec():
    """드리프트 σ_z/2, 제어 σ_x/2, σ_y/2, 목표 Hadamard"""
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
    return ProblemSpec(
        n_qubits=1,
        drift=0.5 * SIGMA_Z,
        controls=(0.5 * SIGMA_X, 0.5 * SIGMA_Y),
        target=hadamard,
    )


@pytest.fixture
def problem_one():
    return build_problem(1)


@pytest.fixture
def random_controller():
    def _make(rng: np.random.Generator, n_controls: int, kappa: int, t_f: float) -> Controller:
        return Controller(rng.uniform(-1.0, 1.0, size=(n_controls, kappa)), t_f)

    return _make
