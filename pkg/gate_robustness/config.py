"""Gate Robustness Configuration

이 모듈은 제어기 합성, 강건성 탐색, 연구 실행의 런타임 설정을 관리합니다.
"""

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .errors import ArgumentError

# 환경 변수 로드
load_dotenv()

THREADS_ENV = "GATE_ROBUSTNESS_THREADS"


class InitStrategy(Enum):
    """최적화 초기값 생성 방식"""
    UNIFORM = "uniform"
    STANDARD_NORMAL = "standard-normal"
    ZEROS = "zeros"


class OptimizerMethod(Enum):
    """지원되는 최적화 알고리즘"""
    QUASI_NEWTON = "quasi-newton"
    TRUST_REGION = "trust-region"


def threads_from_env(default: int = 1) -> int:
    """환경 변수에서 작업 스레드 수를 읽습니다"""
    raw = os.getenv(THREADS_ENV)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ArgumentError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ArgumentError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


@dataclass
class SynthesisConfig:
    """제어기 합성 설정 클래스"""

    init: InitStrategy = field(
        default=InitStrategy.UNIFORM,
        metadata={"description": "초기 제어장 생성 방식"}
    )

    seed: int = field(
        default=0,
        metadata={"description": "마스터 난수 시드 (재시작별 스트림은 (seed, restart)에서 파생)"}
    )

    max_iters: int = field(
        default=5000,
        metadata={"description": "재시작당 최대 반복 횟수", "range": [0, None]}
    )

    grad_tol: float = field(
        default=1e-9,
        metadata={"description": "기울기 최대 노름 수렴 기준"}
    )

    fidelity_filter: float = field(
        default=1e-2,
        metadata={"description": "이 값 미만의 오차를 가진 제어기만 유지", "range": [0, 1]}
    )

    method: OptimizerMethod = field(
        default=OptimizerMethod.QUASI_NEWTON,
        metadata={"description": "최적화 알고리즘"}
    )

    include_zero_start: bool = field(
        default=False,
        metadata={"description": "재시작 0번을 모든 제어장이 0인 초기값으로 실행할지 여부"}
    )

    workers: int = field(
        default_factory=threads_from_env,
        metadata={"description": "병렬 재시작 스레드 수"}
    )

    def __post_init__(self) -> None:
        if isinstance(self.init, str):
            self.init = InitStrategy(self.init)
        if isinstance(self.method, str):
            self.method = OptimizerMethod(self.method)
        if not 0.0 < self.fidelity_filter <= 1.0:
            raise ArgumentError(f"fidelity_filter must lie in (0, 1], got {self.fidelity_filter}")
        if self.max_iters < 0:
            raise ArgumentError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.grad_tol <= 0:
            raise ArgumentError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.workers < 1:
            raise ArgumentError(f"workers must be >= 1, got {self.workers}")


@dataclass
class SearchConfig:
    """최소 성능 위반 섭동 탐색 설정"""

    epsilon: float = field(
        default=0.1,
        metadata={"description": "섭동 오차 임계값 ϵ", "range": [0, 1]}
    )

    step: Optional[float] = field(
        default=None,
        metadata={"description": "고정 탐색 간격 (None이면 자동 선택)"}
    )

    max_iter: int = field(
        default=10_000,
        metadata={"description": "탐색 최대 단계 수"}
    )

    step_tolerance: float = field(
        default=0.1,
        metadata={"description": "간격 선택 시 허용되는 오차 상대 변화량"}
    )

    step_floor: float = field(
        default=1e-6,
        metadata={"description": "자동 선택 간격의 하한"}
    )

    error_floor: float = field(
        default=1e-4,
        metadata={"description": "상대 변화량 분모의 하한 (공칭 오차가 0에 가까울 때)"}
    )

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon <= 1.0:
            raise ArgumentError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.step is not None and self.step <= 0:
            raise ArgumentError(f"step must be positive, got {self.step}")
        if self.max_iter < 1:
            raise ArgumentError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.step_floor <= 0 or self.error_floor <= 0:
            raise ArgumentError("step_floor and error_floor must be positive")


@dataclass
class RunConfig:
    """CLI 한 번의 실행에 해당하는 설정"""

    problem: int = field(
        default=1,
        metadata={"description": "문제 번호", "range": [1, 9]}
    )

    t_f: float = field(
        default=3.0,
        metadata={"description": "게이트 동작 시간 (1/J 단위)"}
    )

    kappa: int = field(
        default=64,
        metadata={"description": "시간 구간 수 κ"}
    )

    restarts: int = field(
        default=100,
        metadata={"description": "독립 재시작 횟수"}
    )

    output_dir: Path = field(
        default=Path("runs"),
        metadata={"description": "결과 파일 디렉터리"}
    )

    structure_file: Optional[Path] = field(
        default=None,
        metadata={"description": "사용자 정의 불확실성 구조 JSON 파일"}
    )

    override: bool = field(
        default=False,
        metadata={"description": "t_f, κ를 문제 목록의 허용값과 대조하지 않음"}
    )

    synthesis: SynthesisConfig = field(
        default_factory=SynthesisConfig,
        metadata={"description": "합성 설정"}
    )

    search: SearchConfig = field(
        default_factory=SearchConfig,
        metadata={"description": "강건성 탐색 설정"}
    )

    def __post_init__(self) -> None:
        self.output_dir = Path(self.output_dir)
        if self.structure_file is not None:
            self.structure_file = Path(self.structure_file)
        if self.restarts < 0:
            raise ArgumentError(f"restarts must be >= 0, got {self.restarts}")
        if self.kappa < 1:
            raise ArgumentError(f"kappa must be >= 1, got {self.kappa}")
        if self.t_f <= 0:
            raise ArgumentError(f"t_f must be positive, got {self.t_f}")


@dataclass
class StudyConfig:
    """연구 워크플로우 공통 설정"""

    workers: int = field(
        default_factory=threads_from_env,
        metadata={"description": "제어기 단위 병렬 처리 스레드 수"}
    )

    tracing: bool = field(
        default=True,
        metadata={"description": "Langfuse 추적 사용 여부 (키가 없으면 자동 비활성화)"}
    )

    write_traces: bool = field(
        default=False,
        metadata={"description": "제어기별 탐색 경로 CSV 저장 여부"}
    )
