"""충실도 오차의 미분 민감도

계수 행렬 Z, 미분 민감도 ζ, 정적/가변 불확실성 상한, 최악 방향 수열,
로그 민감도를 계산합니다.

Z_m^(k) = Re{ -(e^{-iφ}/N) Tr[ Φ^(k,0) U_f† Φ^(κ,k+1) X_m^(k) ] }

전방 누적곱은 t_k 까지, 후방 누적곱은 t_{k+1} 부터이며 구간 k 자체는
X_m^(k) 가 담당합니다. 이 분할은 ε̃의 중앙 차분과 일치하도록 고정되어 있습니다.
"""

import logging
from typing import Iterable, Optional

import numpy as np
from numpy.typing import NDArray

from .dynamics import fidelity, propagate
from .errors import ArgumentError, LogSensitivityUndefinedError, PhaseUndefinedError
from .linalg import Operator, dagger, frobenius_normalize, pauli_embed
from .models import (
    Controller,
    DirectionSequence,
    FidelityResult,
    LogSensitivity,
    PropagatorSet,
    SensitivityReport,
    UncertaintyStructure,
    VariableBound,
)
from .problems import ProblemSpec

logger = logging.getLogger(__name__)


def default_structure(
    spec: ProblemSpec, slots: Optional[Iterable[int]] = None
) -> UncertaintyStructure:
    """Ĥ_0 = H0/‖H0‖_F, Ĥ_m = H_m/‖H_m‖_F 로 구성한 기본 불확실성 구조

    Args:
        spec: 게이트 문제
        slots: 활성화할 슬롯 번호 (None이면 전체). 영행렬 슬롯은 자동으로 제외됩니다.
    """
    operators = [spec.drift, *spec.controls]
    wanted = set(range(len(operators))) if slots is None else set(slots)
    if not wanted <= set(range(len(operators))):
        raise ArgumentError(f"slots {sorted(wanted)} out of range 0..{len(operators) - 1}")
    structures = np.zeros((len(operators), spec.dim, spec.dim), dtype=complex)
    mask = []
    for m, op in enumerate(operators):
        active = m in wanted and np.linalg.norm(op) > 0.0
        if m in wanted and not active:
            logger.warning(f"Slot {m} has a zero operator and is excluded from the structure")
        if active:
            structures[m] = frobenius_normalize(op)
        mask.append(active)
    return UncertaintyStructure(structures, tuple(mask))


def drift_only(spec: ProblemSpec) -> UncertaintyStructure:
    return default_structure(spec, slots=[0])


def controls_only(spec: ProblemSpec) -> UncertaintyStructure:
    return default_structure(spec, slots=range(1, spec.n_controls + 1))


def coupling_structure(spec: ProblemSpec, site: int) -> UncertaintyStructure:
    """큐비트 site, site+1 사이 단일 J-결합의 불확실성 (드리프트 슬롯)

    구조 행렬은 (1/2)σ_z^(site) σ_z^(site+1) 를 정규화한 것입니다.
    """
    q = spec.n_qubits
    if not 1 <= site < q:
        raise ArgumentError(f"coupling site must satisfy 1 <= site < {q}, got {site}")
    structures = np.zeros((spec.n_controls + 1, spec.dim, spec.dim), dtype=complex)
    structures[0] = frobenius_normalize(
        0.5 * pauli_embed("z", site, q) @ pauli_embed("z", site + 1, q)
    )
    return UncertaintyStructure(structures, (True,) + (False,) * spec.n_controls)


def trace_derivatives(props: PropagatorSet, target: Operator, operators: Operator) -> Operator:
    """T_p^(k) = Tr[Φ^(k,0) U_f† Φ^(κ,k+1) X_p^(k)] (배율 1), shape (κ, P)

    X_p^(k) 는 구간 k 해밀토니안의 고유분해로 계산한 방향 Ĥ = operators[p] 의
    Fréchet 미분입니다.
    """
    v = props.eigenvectors
    vh = dagger(v)
    sandwich = props.forward[:-1] @ dagger(target)[None] @ props.backward[1:]
    b = vh @ sandwich @ v
    w = vh[:, None] @ operators[None] @ v[:, None]
    return np.einsum("kji,kpij,kij->kp", b, w, props.kernel)


def _require_phase(fid: FidelityResult) -> None:
    if fid.degenerate:
        raise PhaseUndefinedError()


def z_from_propagators(
    props: PropagatorSet,
    target: Operator,
    unc: UncertaintyStructure,
    alpha: NDArray[np.float64],
) -> NDArray[np.float64]:
    """이미 계산된 전파자에서 Z (κ × (M+1)) 계산"""
    fid = fidelity(props, target)
    _require_phase(fid)
    traces = trace_derivatives(props, target, unc.structures)
    factor = -np.exp(-1j * fid.phase) / props.dim
    return np.real(factor * traces) * alpha * unc.mask_array


def z_coefficients(
    spec: ProblemSpec,
    ctrl: Controller,
    unc: UncertaintyStructure,
    props: Optional[PropagatorSet] = None,
) -> NDArray[np.float64]:
    """민감도 계수 Z_m^(k)

    Raises:
        PhaseUndefinedError: 공칭 충실도가 0이라 위상이 정의되지 않는 경우
    """
    if unc.dim != spec.dim:
        raise ArgumentError(f"structure dimension {unc.dim} does not match problem {spec.dim}")
    props = props if props is not None else propagate(spec, ctrl)
    return z_from_propagators(props, spec.target, unc, unc.alpha(ctrl))


def differential_sensitivity(z: NDArray[np.float64], dirs: DirectionSequence) -> float:
    """ζ = Σ_k Z^(k) s^(k)"""
    if z.shape != dirs.weights.shape:
        raise ArgumentError(f"Z shape {z.shape} does not match directions {dirs.weights.shape}")
    return float(np.sum(z * dirs.weights))


def bound_vu(z: NDArray[np.float64]) -> VariableBound:
    """가변 불확실성 상한 B_vu = Σ_k ‖Z^(k)‖_2 와 이를 달성하는 방향"""
    varsigma = np.linalg.norm(z, axis=1)
    safe = np.where(varsigma > 0.0, varsigma, 1.0)[:, None]
    worst = np.where(varsigma[:, None] > 0.0, z / safe, 0.0)
    return VariableBound(
        b_vu=float(np.sum(varsigma)),
        worst_dirs=DirectionSequence(worst),
        varsigma=varsigma,
    )


def bound_static(z: NDArray[np.float64]) -> float:
    """정적 불확실성 상한 ‖Γ‖_2, Γ = Σ_k Z^(k)

    단위 벡터 s 에 대한 선형사상 s ↦ Γs 의 작용소 노름입니다.
    """
    return float(np.linalg.norm(z.sum(axis=0)))


def log_sensitivity_from(z: NDArray[np.float64], error: float) -> LogSensitivity:
    """S = Γ / ε (ε ≤ 0 은 반올림으로 생긴 값이라도 정의되지 않음)"""
    if error <= 0.0:
        raise LogSensitivityUndefinedError()
    per_slot = z.sum(axis=0) / error
    return LogSensitivity(per_slot=per_slot, norm=float(np.linalg.norm(per_slot)))


def log_sensitivity(
    spec: ProblemSpec,
    ctrl: Controller,
    unc: UncertaintyStructure,
    props: Optional[PropagatorSet] = None,
) -> LogSensitivity:
    """S_μ = ζ_μ / ε (μ 방향은 시간 불변 자연 기저 e_μ)"""
    props = props if props is not None else propagate(spec, ctrl)
    fid = fidelity(props, spec.target)
    if fid.error <= 0.0:
        raise LogSensitivityUndefinedError()
    z = z_coefficients(spec, ctrl, unc, props)
    return log_sensitivity_from(z, fid.error)


def sensitivity_report(
    spec: ProblemSpec,
    ctrl: Controller,
    unc: UncertaintyStructure,
    dirs: Optional[DirectionSequence] = None,
) -> SensitivityReport:
    """제어기 하나의 민감도 지표 전체

    dirs를 생략하면 ζ는 최악 방향에서의 값(= B_vu)입니다.
    공칭 오차가 0 이하이면 로그 민감도는 None 입니다.
    """
    props = propagate(spec, ctrl)
    fid = fidelity(props, spec.target)
    z = z_coefficients(spec, ctrl, unc, props)
    bound = bound_vu(z)
    zeta = differential_sensitivity(z, dirs if dirs is not None else bound.worst_dirs)
    log_sens = None
    if fid.error > 0.0:
        log_sens = log_sensitivity_from(z, fid.error)
    else:
        logger.warning(
            f"Nominal error {fid.error:.3e} is not positive; log-sensitivity left undefined"
        )
    return SensitivityReport(
        z=z,
        gamma=z.sum(axis=0),
        zeta=zeta,
        b_vu=bound.b_vu,
        b_static=bound_static(z),
        worst_dirs=bound.worst_dirs,
        varsigma=bound.varsigma,
        fidelity=fid,
        log_sensitivity=log_sens,
    )

