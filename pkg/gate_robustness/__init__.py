"""Gate Robustness

구간별 상수 제어로 합성한 양자 게이트 제어기의 구조적 불확실성 민감도를 분석하는
패키지입니다. 제어기 집합 합성, 민감도 상한과 최소 성능 위반 섭동 계산,
상관 가설 검정을 제공합니다.
"""

from .config import RunConfig, SearchConfig, StudyConfig, SynthesisConfig
from .dynamics import fidelity, perturbed_error, propagate
from .errors import (
    ArgumentError,
    ContractError,
    DegenerateSampleError,
    GateRobustnessError,
    InsufficientSampleError,
    PhaseUndefinedError,
    StorageError,
)
from .models import Controller, DirectionSequence, UncertaintyStructure
from .problems import ProblemSpec, build_problem, problem_registry
from .search import choose_step_size, find_delta_bar
from .sensitivity import (
    bound_static,
    bound_vu,
    default_structure,
    differential_sensitivity,
    log_sensitivity,
    sensitivity_report,
    z_coefficients,
)
from .stats import kendall_test, pearson_test
from .synthesis import batch_synthesize, gradient_error, optimize
from .tracing import TracingManager, get_tracing_manager, initialize_tracing
from .workflow import StudyWorkflow, create_study_workflow

__version__ = "0.1.0"

__all__ = [
    # 워크플로우
    "StudyWorkflow",
    "create_study_workflow",

    # 설정
    "RunConfig",
    "SearchConfig",
    "StudyConfig",
    "SynthesisConfig",

    # 모델
    "Controller",
    "DirectionSequence",
    "ProblemSpec",
    "UncertaintyStructure",

    # 문제와 동역학
    "build_problem",
    "problem_registry",
    "propagate",
    "fidelity",
    "perturbed_error",

    # 민감도와 탐색
    "z_coefficients",
    "differential_sensitivity",
    "bound_vu",
    "bound_static",
    "log_sensitivity",
    "sensitivity_report",
    "default_structure",
    "choose_step_size",
    "find_delta_bar",

    # 합성과 통계
    "gradient_error",
    "optimize",
    "batch_synthesize",
    "pearson_test",
    "kendall_test",

    # 오류
    "GateRobustnessError",
    "ArgumentError",
    "ContractError",
    "PhaseUndefinedError",
    "DegenerateSampleError",
    "InsufficientSampleError",
    "StorageError",

    # 추적
    "TracingManager",
    "get_tracing_manager",
    "initialize_tracing",
]
