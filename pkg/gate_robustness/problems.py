"""벤치마크 게이트 문제 정의

선형 큐비트 레지스터의 드리프트 해밀토니안, 제어 해밀토니안 집합, 목표 게이트를
구성하고 아홉 개의 벤치마크 문제 목록을 제공합니다.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ArgumentError
from .linalg import Operator, haar_unitary, is_hermitian, is_unitary, pauli_embed

logger = logging.getLogger(__name__)

# Problems 6 and 9 share this target.
RANDOM_UNITARY_SEED = 20_240_607


class CouplingKind(Enum):
    """인접 큐비트 결합 방식"""
    ISING_ZZ = "ising-zz"
    HEISENBERG_XXX = "heisenberg-xxx"
    ISING_ZZ_STARK = "ising-zz-stark"

    @property
    def alpha(self) -> float:
        return 1.0 if self is CouplingKind.HEISENBERG_XXX else 0.0

    @property
    def beta(self) -> float:
        return 1.0

    @property
    def has_onsite(self) -> bool:
        return self is CouplingKind.ISING_ZZ_STARK


class ControlTopology(Enum):
    """제어 구조"""
    INDIVIDUAL_QUBIT = "individual-qubit"
    GLOBAL_SIMULTANEOUS = "global-simultaneous"
    FIRST_QUBIT_ONLY = "first-qubit-only"

    def n_controls(self, n_qubits: int) -> int:
        if self is ControlTopology.INDIVIDUAL_QUBIT:
            return 2 * n_qubits
        return 2


class TargetKind(Enum):
    """목표 게이트 종류"""
    CNOT = "cnot"
    QFT = "qft"
    RANDOM_UNITARY = "random-unitary"


@dataclass(frozen=True)
class TargetGate:
    """목표 게이트 기술자"""

    kind: TargetKind
    dim: int = 4
    seed: Optional[int] = None

    @classmethod
    def cnot(cls) -> "TargetGate":
        return cls(TargetKind.CNOT, 4)

    @classmethod
    def qft(cls, dim: int) -> "TargetGate":
        return cls(TargetKind.QFT, dim)

    @classmethod
    def random_unitary(cls, dim: int, seed: int = RANDOM_UNITARY_SEED) -> "TargetGate":
        return cls(TargetKind.RANDOM_UNITARY, dim, seed)

    @property
    def label(self) -> str:
        if self.kind is TargetKind.RANDOM_UNITARY:
            return f"random-unitary(N={self.dim}, seed={self.seed})"
        if self.kind is TargetKind.QFT:
            return f"qft(N={self.dim})"
        return "cnot"


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """게이트 충실도 문제 하나의 인스턴스

    label 0은 사용자 정의 문제(테스트용 단일 큐비트 예제 등)에 사용합니다.
    """

    n_qubits: int
    drift: Operator
    controls: Tuple[Operator, ...]
    target: Operator
    label: int = 0
    description: str = ""

    def __post_init__(self) -> None:
        dim = 2 ** self.n_qubits
        if self.drift.shape != (dim, dim) or self.target.shape != (dim, dim):
            raise ArgumentError(f"operators must be {dim}x{dim} for Q={self.n_qubits}")
        if any(h.shape != (dim, dim) for h in self.controls):
            raise ArgumentError(f"control Hamiltonians must be {dim}x{dim}")
        if not is_hermitian(self.drift) or not all(is_hermitian(h) for h in self.controls):
            raise ArgumentError("drift and control Hamiltonians must be Hermitian")
        if not is_unitary(self.target):
            raise ArgumentError("target gate must be unitary")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    @property
    def control_stack(self) -> Operator:
        """(M, N, N) 배열"""
        return np.stack(self.controls) if self.controls else np.zeros((0, self.dim, self.dim), complex)


def build_drift(n_qubits: int, kind: CouplingKind) -> Operator:
    """회전파 근사 후의 드리프트 해밀토니안

    (1/2)Σ_ℓ (α σ_x^ℓ σ_x^ℓ+1 + α σ_y^ℓ σ_y^ℓ+1 + β σ_z^ℓ σ_z^ℓ+1),
    Stark 종류는 추가로 (1/2)Σ_ℓ (ℓ+2) σ_z^ℓ 를 뺍니다.
    """
    if n_qubits < 2:
        raise ArgumentError(f"drift needs at least 2 qubits, got {n_qubits}")
    dim = 2 ** n_qubits
    h = np.zeros((dim, dim), dtype=complex)
    for ell in range(1, n_qubits):
        if kind.alpha:
            h += kind.alpha * pauli_embed("x", ell, n_qubits) @ pauli_embed("x", ell + 1, n_qubits)
            h += kind.alpha * pauli_embed("y", ell, n_qubits) @ pauli_embed("y", ell + 1, n_qubits)
        h += kind.beta * pauli_embed("z", ell, n_qubits) @ pauli_embed("z", ell + 1, n_qubits)
    h *= 0.5
    if kind.has_onsite:
        for ell in range(1, n_qubits + 1):
            h -= 0.5 * (ell + 2) * pauli_embed("z", ell, n_qubits)
    return h


def build_controls(n_qubits: int, topology: ControlTopology) -> List[Operator]:
    """제어 해밀토니안 목록 (x, y 순서)"""
    if n_qubits < 1:
        raise ArgumentError(f"n_qubits must be >= 1, got {n_qubits}")
    if topology is ControlTopology.INDIVIDUAL_QUBIT:
        controls = []
        for m in range(1, n_qubits + 1):
            controls.append(0.5 * pauli_embed("x", m, n_qubits))
            controls.append(0.5 * pauli_embed("y", m, n_qubits))
        return controls
    if topology is ControlTopology.GLOBAL_SIMULTANEOUS:
        sites = range(1, n_qubits + 1)
        return [
            0.5 * sum(pauli_embed("x", ell, n_qubits) for ell in sites),
            0.5 * sum(pauli_embed("y", ell, n_qubits) for ell in sites),
        ]
    return [0.5 * pauli_embed("x", 1, n_qubits), 0.5 * pauli_embed("y", 1, n_qubits)]


def cnot_matrix() -> Operator:
    """큐비트 1이 제어, 큐비트 2가 대상인 CNOT (|10⟩ ↔ |11⟩)"""
    u = np.eye(4, dtype=complex)
    u[[2, 3]] = u[[3, 2]]
    return u


def qft_matrix(dim: int) -> Operator:
    """QFT_(j,k) = ω^{jk}/√N, ω = exp(2πi/N)"""
    if dim < 1:
        raise ArgumentError(f"dim must be >= 1, got {dim}")
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    # 지수를 N으로 나눈 나머지로 줄여 큰 jk에서의 위상 오차를 막음
    return np.exp(2j * np.pi * ((j * k) % dim) / dim) / np.sqrt(dim)


def build_target(gate: TargetGate) -> Operator:
    """목표 게이트 행렬 생성"""
    if gate.kind is TargetKind.CNOT:
        return cnot_matrix()
    if gate.dim & (gate.dim - 1):
        raise ArgumentError(f"register targets need a power-of-two dimension, got {gate.dim}")
    if gate.kind is TargetKind.QFT:
        return qft_matrix(gate.dim)
    seed = RANDOM_UNITARY_SEED if gate.seed is None else gate.seed
    return haar_unitary(gate.dim, seed)


@dataclass(frozen=True)
class ProblemTemplate:
    """문제 목록의 한 행 (행렬은 필요할 때 생성)"""

    label: int
    coupling: CouplingKind
    n_qubits: int
    topology: ControlTopology
    target: TargetGate
    tf_options: Tuple[float, ...]
    kappa_options: Tuple[int, ...]
    description: str = field(default="")

    def build(self) -> ProblemSpec:
        """드리프트, 제어, 목표 행렬을 생성합니다"""
        logger.debug(f"Building problem {self.label}: {self.description}")
        return ProblemSpec(
            n_qubits=self.n_qubits,
            drift=build_drift(self.n_qubits, self.coupling),
            controls=tuple(build_controls(self.n_qubits, self.topology)),
            target=build_target(self.target),
            label=self.label,
            description=self.description,
        )

    def admits(self, t_f: float, kappa: int) -> bool:
        return t_f in self.tf_options and kappa in self.kappa_options


def _template(
    label: int,
    coupling: CouplingKind,
    n_qubits: int,
    topology: ControlTopology,
    target: TargetGate,
    tf_options: Tuple[float, ...],
    kappa_options: Tuple[int, ...],
) -> ProblemTemplate:
    description = f"{coupling.value} Q={n_qubits} {topology.value} -> {target.label}"
    return ProblemTemplate(
        label, coupling, n_qubits, topology, target, tf_options, kappa_options, description
    )


_REGISTRY: Dict[int, ProblemTemplate] = {
    t.label: t
    for t in (
        _template(1, CouplingKind.ISING_ZZ, 2, ControlTopology.INDIVIDUAL_QUBIT,
                  TargetGate.cnot(), (2, 3, 4), (40, 64, 128)),
        _template(2, CouplingKind.ISING_ZZ, 3, ControlTopology.INDIVIDUAL_QUBIT,
                  TargetGate.qft(8), (7, 8), (40, 64)),
        _template(3, CouplingKind.ISING_ZZ, 4, ControlTopology.INDIVIDUAL_QUBIT,
                  TargetGate.qft(16), (12, 15, 20), (40, 64)),
        _template(4, CouplingKind.ISING_ZZ, 5, ControlTopology.INDIVIDUAL_QUBIT,
                  TargetGate.qft(32), (12, 15, 25), (64, 128)),
        _template(5, CouplingKind.HEISENBERG_XXX, 3, ControlTopology.INDIVIDUAL_QUBIT,
                  TargetGate.qft(8), (7, 8), (40, 64)),
        _template(6, CouplingKind.HEISENBERG_XXX, 3, ControlTopology.INDIVIDUAL_QUBIT,
                  TargetGate.random_unitary(8), (7, 8), (40, 64)),
        _template(7, CouplingKind.ISING_ZZ_STARK, 5, ControlTopology.GLOBAL_SIMULTANEOUS,
                  TargetGate.qft(32), (125, 150), (1000,)),
        _template(8, CouplingKind.HEISENBERG_XXX, 3, ControlTopology.FIRST_QUBIT_ONLY,
                  TargetGate.qft(8), (10, 15), (32, 64)),
        _template(9, CouplingKind.HEISENBERG_XXX, 3, ControlTopology.FIRST_QUBIT_ONLY,
                  TargetGate.random_unitary(8), (10, 15), (32, 64)),
    )
}


def problem_registry() -> Dict[int, ProblemTemplate]:
    """문제 번호(1-9) → 템플릿"""
    return dict(_REGISTRY)


def get_template(label: int) -> ProblemTemplate:
    try:
        return _REGISTRY[label]
    except KeyError:
        raise ArgumentError(f"unknown problem {label}; expected one of {sorted(_REGISTRY)}") from None


@lru_cache(maxsize=None)
def build_problem(label: int) -> ProblemSpec:
    """문제 번호로 ProblemSpec 생성 (결과는 캐시됨)"""
    return get_template(label).build()


def validate_timing(label: int, t_f: float, kappa: int, override: bool = False) -> None:
    """(t_f, κ)가 문제 목록의 허용값인지 확인"""
    template = get_template(label)
    if override or template.admits(t_f, kappa):
        return
    raise ArgumentError(
        f"problem {label} admits t_f in {template.tf_options} and kappa in "
        f"{template.kappa_options}; got t_f={t_f:g}, kappa={kappa} (use --override)"
    )
