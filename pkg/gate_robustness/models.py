"""Gate Robustness Data Models

이 모듈은 제어기, 전파자, 불확실성 구조, 분석 결과 등 패키지 전반에서 사용되는
데이터 모델들을 정의합니다.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field

from .errors import ArgumentError, ContractError
from .linalg import Operator, frechet_kernel, is_hermitian

ROW_NORM_TOL = 1e-12
SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class Controller:
    """구간별 상수 제어기

    fields[m, k] = f_m^(k) (M × κ), Δ = t_f / κ 는 저장하지 않고 유도합니다.
    """

    fields: NDArray[np.float64]
    t_f: float

    def __post_init__(self) -> None:
        arr = np.array(self.fields, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ArgumentError(f"fields must be an M x kappa array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("control amplitudes must be finite")
        if not self.t_f > 0:
            raise ArgumentError(f"t_f must be positive, got {self.t_f}")
        arr.setflags(write=False)
        object.__setattr__(self, "fields", arr)
        object.__setattr__(self, "t_f", float(self.t_f))

    @property
    def n_controls(self) -> int:
        return self.fields.shape[0]

    @property
    def kappa(self) -> int:
        return self.fields.shape[1]

    @property
    def delta_t(self) -> float:
        return self.t_f / self.kappa

    @property
    def times(self) -> NDArray[np.float64]:
        """구간 시작 시각 t_k = kΔ"""
        return np.arange(self.kappa) * self.delta_t

    def adjoint(self) -> "Controller":
        """부호를 뒤집고 시간 순서를 거꾸로 한 제어기"""
        return Controller(-self.fields[:, ::-1], self.t_f)


@dataclass(frozen=True, eq=False)
class PropagatorSet:
    """구간별 전파자와 누적곱

    steps[k] = Φ^(k+1,k), forward[k] = Φ^(k,0) (forward[0] = I),
    backward[k] = Φ^(κ,k) (backward[κ] = I).
    각 구간 해밀토니안의 고유분해를 함께 보관하여 Fréchet 미분에 재사용합니다.
    """

    steps: Operator
    forward: Operator
    backward: Operator
    eigenvalues: NDArray[np.float64]
    eigenvectors: Operator
    delta_t: float

    @property
    def kappa(self) -> int:
        return self.steps.shape[0]

    @property
    def dim(self) -> int:
        return self.steps.shape[-1]

    @property
    def total(self) -> Operator:
        return self.forward[-1]

    @cached_property
    def kernel(self) -> Operator:
        return frechet_kernel(self.eigenvalues, self.delta_t)


@dataclass(frozen=True)
class FidelityResult:
    """공칭 충실도 F = |Tr(U_f† Φ)|/N, 오차 ε = 1 - F, 위상 φ"""

    fidelity: float
    error: float
    phase: float
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class UncertaintyStructure:
    """정규화된 구조 행렬 Ĥ_0..Ĥ_M 과 활성 슬롯 마스크

    슬롯 0은 드리프트(α = 1), 슬롯 m ≥ 1은 제어 m (α_m^(k) = f_m^(k)) 입니다.
    비활성 슬롯의 행렬은 0으로 저장됩니다.
    """

    structures: Operator
    mask: Tuple[bool, ...]

    def __post_init__(self) -> None:
        arr = np.array(self.structures, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ArgumentError(f"structures must have shape (M+1, N, N), got {arr.shape}")
        mask = tuple(bool(b) for b in self.mask)
        if len(mask) != arr.shape[0]:
            raise ArgumentError(f"mask has {len(mask)} entries for {arr.shape[0]} slots")
        for m, active in enumerate(mask):
            if not active:
                arr[m] = 0.0
                continue
            if not is_hermitian(arr[m]):
                raise ContractError(f"structure slot {m} is not Hermitian")
            norm = np.linalg.norm(arr[m])
            if abs(norm - 1.0) > ROW_NORM_TOL:
                raise ContractError(f"structure slot {m} has Frobenius norm {norm:.15g}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "structures", arr)
        object.__setattr__(self, "mask", mask)

    @property
    def n_slots(self) -> int:
        return self.structures.shape[0]

    @property
    def dim(self) -> int:
        return self.structures.shape[-1]

    @property
    def mask_array(self) -> NDArray[np.float64]:
        return np.array(self.mask, dtype=float)

    def alpha(self, ctrl: Controller) -> NDArray[np.float64]:
        """(κ, M+1) 배율 α_m^(k)"""
        if ctrl.n_controls != self.n_slots - 1:
            raise ArgumentError(
                f"structure has {self.n_slots - 1} control slots, controller has {ctrl.n_controls}"
            )
        return np.column_stack([np.ones(ctrl.kappa), ctrl.fields.T])


@dataclass(frozen=True, eq=False)
class DirectionSequence:
    """구간별 방향 가중치 s_m^(k) (κ × (M+1))

    각 행은 유클리드 단위 벡터이거나 전부 0 입니다.
    """

    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.array(self.weights, dtype=float)
        if arr.ndim != 2:
            raise ArgumentError(f"weights must be a kappa x (M+1) array, got shape {arr.shape}")
        norms = np.linalg.norm(arr, axis=1)
        bad = ~((np.abs(norms - 1.0) <= ROW_NORM_TOL) | (norms == 0.0))
        if np.any(bad):
            rows = np.flatnonzero(bad)[:5].tolist()
            raise ArgumentError(f"direction rows {rows} are neither unit nor zero")
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    @property
    def kappa(self) -> int:
        return self.weights.shape[0]

    @property
    def n_slots(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, kappa: int, n_slots: int) -> "DirectionSequence":
        return cls(np.zeros((kappa, n_slots)))

    @classmethod
    def constant(cls, kappa: int, vector: NDArray[np.float64]) -> "DirectionSequence":
        """시간에 대해 일정한 방향 (정규화 후 κ번 반복)"""
        v = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return cls.zeros(kappa, v.size)
        return cls(np.tile(v / norm, (kappa, 1)))

    @classmethod
    def basis(cls, kappa: int, n_slots: int, mu: int) -> "DirectionSequence":
        """자연 기저 방향 e_μ"""
        if not 0 <= mu < n_slots:
            raise ArgumentError(f"mu must satisfy 0 <= mu < {n_slots}, got {mu}")
        e = np.zeros(n_slots)
        e[mu] = 1.0
        return cls.constant(kappa, e)

    @classmethod
    def random(
        cls,
        kappa: int,
        n_slots: int,
        rng: np.random.Generator,
        mask: Optional[Tuple[bool, ...]] = None,
    ) -> "DirectionSequence":
        """각 행이 (활성 슬롯 위에서) 균일한 단위 벡터인 무작위 방향"""
        w = rng.standard_normal((kappa, n_slots))
        if mask is not None:
            w = w * np.array(mask, dtype=float)
        norms = np.linalg.norm(w, axis=1, keepdims=True)
        return cls(np.divide(w, norms, out=np.zeros_like(w), where=norms > 0))


@dataclass(frozen=True)
class VariableBound:
    """가변 불확실성 상한 B_vu, 최악 방향, 구간별 ς̄^(k)"""

    b_vu: float
    worst_dirs: DirectionSequence
    varsigma: NDArray[np.float64]


@dataclass(frozen=True)
class LogSensitivity:
    """주 방향별 로그 민감도 S_μ 와 그 2-노름"""

    per_slot: NDArray[np.float64]
    norm: float


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    """제어기 하나의 민감도 분석 결과"""

    z: NDArray[np.float64]
    gamma: NDArray[np.float64]
    zeta: float
    b_vu: float
    b_static: float
    worst_dirs: DirectionSequence
    varsigma: NDArray[np.float64]
    fidelity: FidelityResult
    log_sensitivity: Optional[LogSensitivity] = None

    @property
    def log_sens_norm(self) -> Optional[float]:
        return None if self.log_sensitivity is None else self.log_sensitivity.norm


class Termination(str, Enum):
    CROSSED = "crossed"
    MAX_ITERATIONS = "max-iterations"


@dataclass
class DeltaSearchResult:
    """최악 경로를 따른 최대 허용 섭동 δ̄ 탐색 결과

    trace[i] = (δ_n, ε̃(δ_n)) 이며 crossed로 끝나면 마지막 항목만 ε̃ ≥ ϵ 입니다.
    """

    delta_bar: float
    n_bar: int
    step: float
    threshold: float
    terminated: Termination
    trace: List[Tuple[float, float]] = field(default_factory=list)
    step_at_floor: bool = False


@dataclass(frozen=True)
class StepChoice:
    """사다리에서 고른 탐색 간격"""

    step: float
    relative_change: float
    at_floor: bool = False


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    """재시작 한 번의 최적화 결과"""

    controller: Controller
    error: float
    iterations: int
    converged: bool
    seed: int
    restart: int
    init: str
    method: str


class Tail(str, Enum):
    """단측 검정 방향"""
    NEGATIVE = "negative"
    POSITIVE = "positive"


@dataclass(frozen=True)
class CorrelationResult:
    """단측 상관 가설 검정 결과"""

    n: int
    coefficient: float
    statistic: float
    p_value: float
    tail: Tail
    significant: bool
    method: str = "pearson"


class ControllerRecord(BaseModel):
    """JSON으로 저장되는 제어기 레코드"""

    schema_version: int = Field(default=SCHEMA_VERSION, description="레코드 형식 버전")
    controller_id: str = Field(description="정렬 가능한 제어기 식별자")
    problem: int = Field(description="문제 번호 (0은 사용자 정의)")
    t_f: float = Field(description="게이트 동작 시간")
    kappa: int = Field(description="시간 구간 수")
    fields: List[List[float]] = Field(description="M × κ 제어장 배열")
    seed: int = Field(description="마스터 난수 시드")
    restart: int = Field(description="재시작 번호")
    init: str = Field(description="초기값 생성 방식")
    method: str = Field(default="quasi-newton", description="최적화 알고리즘")
    error: float = Field(description="저장 시점의 충실도 오차 ε")
    iterations: int = Field(default=0, description="최적화 반복 횟수")
    converged: bool = Field(default=False, description="기울기 기준 수렴 여부")

    def to_controller(self) -> Controller:
        ctrl = Controller(np.array(self.fields, dtype=float), self.t_f)
        if ctrl.kappa != self.kappa:
            raise ArgumentError(f"{self.controller_id}: kappa {self.kappa} != {ctrl.kappa} columns")
        return ctrl

    @classmethod
    def from_result(cls, result: SynthesisResult, problem: int) -> "ControllerRecord":
        ctrl = result.controller
        return cls(
            controller_id=controller_id(problem, ctrl.t_f, ctrl.kappa, result.restart),
            problem=problem,
            t_f=ctrl.t_f,
            kappa=ctrl.kappa,
            fields=ctrl.fields.tolist(),
            seed=result.seed,
            restart=result.restart,
            init=result.init,
            method=result.method,
            error=result.error,
            iterations=result.iterations,
            converged=result.converged,
        )


class RobustnessRecord(BaseModel):
    """제어기별 강건성 분석 결과 (CSV 한 행)"""

    controller_id: str = Field(description="제어기 식별자")
    problem: int = Field(description="문제 번호")
    t_f: float = Field(description="게이트 동작 시간")
    kappa: int = Field(description="시간 구간 수")
    error: float = Field(description="공칭 충실도 오차 ε")
    b_vu: float = Field(description="가변 불확실성 민감도 상한")
    b_static: float = Field(description="정적 불확실성 민감도 상한")
    log_sens_norm: float = Field(description="로그 민감도 노름 ‖S‖")
    delta_bar: float = Field(description="최소 성능 위반 섭동 δ̄")
    step: float = Field(description="탐색 간격 𝚍")
    terminated: str = Field(description="탐색 종료 사유")
    step_at_floor: bool = Field(default=False, description="간격 사다리가 하한까지 내려갔는지 여부")
    seed: int = Field(description="마스터 난수 시드")
    restart: int = Field(description="재시작 번호")
    init: str = Field(description="초기값 생성 방식")


def controller_id(problem: int, t_f: float, kappa: int, restart: int) -> str:
    """정렬 순서가 재시작 순서와 같은 식별자"""
    return f"p{problem}-tf{t_f:g}-k{kappa}-r{restart:04d}"
