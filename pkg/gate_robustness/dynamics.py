"""구간별 상수 시간 발전

전파자 누적곱, 공칭 충실도, 섭동된 충실도 오차를 계산합니다.
"""

import logging
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .errors import ArgumentError
from .linalg import Operator, dagger, hermitian_eigensystem, propagators_from_eigensystem
from .models import Controller, DirectionSequence, FidelityResult, PropagatorSet, UncertaintyStructure
from .problems import ProblemSpec

logger = logging.getLogger(__name__)

# |Tr| 가 이 값 이하이면 위상을 정의하지 않음
DEGENERATE_TRACE_TOL = 1e-14


def _check_controller(spec: ProblemSpec, ctrl: Controller) -> None:
    if ctrl.n_controls != spec.n_controls:
        raise ArgumentError(
            f"controller has {ctrl.n_controls} rows, problem has {spec.n_controls} controls"
        )


def step_hamiltonians(spec: ProblemSpec, ctrl: Controller) -> Operator:
    """H^(k) = H0 + Σ_m H_m f_m^(k), shape (κ, N, N)"""
    _check_controller(spec, ctrl)
    h = np.broadcast_to(spec.drift, (ctrl.kappa, spec.dim, spec.dim)).copy()
    if spec.n_controls:
        h += np.einsum("mk,mij->kij", ctrl.fields, spec.control_stack)
    return h


def perturbation_terms(
    unc: UncertaintyStructure, alpha: NDArray[np.float64], dirs: DirectionSequence
) -> Operator:
    """Σ_m s_m^(k) α_m^(k) Ĥ_m, shape (κ, N, N)"""
    if dirs.weights.shape != alpha.shape:
        raise ArgumentError(
            f"direction shape {dirs.weights.shape} does not match (kappa, M+1) = {alpha.shape}"
        )
    return np.einsum("km,mij->kij", dirs.weights * alpha * unc.mask_array, unc.structures)


def propagate_hamiltonians(hamiltonians: Operator, delta_t: float) -> PropagatorSet:
    """구간 해밀토니안 배열로부터 PropagatorSet 생성"""
    kappa, dim, _ = hamiltonians.shape
    values, vectors = hermitian_eigensystem(hamiltonians)
    steps = propagators_from_eigensystem(values, vectors, delta_t)

    eye = np.eye(dim, dtype=complex)
    forward = np.empty((kappa + 1, dim, dim), dtype=complex)
    backward = np.empty((kappa + 1, dim, dim), dtype=complex)
    forward[0] = eye
    backward[kappa] = eye
    for k in range(kappa):
        forward[k + 1] = steps[k] @ forward[k]
    for k in range(kappa - 1, -1, -1):
        backward[k] = backward[k + 1] @ steps[k]

    return PropagatorSet(
        steps=steps,
        forward=forward,
        backward=backward,
        eigenvalues=values,
        eigenvectors=vectors,
        delta_t=delta_t,
    )


def propagate(spec: ProblemSpec, ctrl: Controller) -> PropagatorSet:
    """제어기에 대한 전파자 집합을 계산합니다

    Args:
        spec: 게이트 문제
        ctrl: M 행이 spec.controls와 일치하는 제어기

    Returns:
        구간 전파자와 전/후방 누적곱
    """
    return propagate_hamiltonians(step_hamiltonians(spec, ctrl), ctrl.delta_t)


def fidelity_of(total: Operator, target: Operator) -> FidelityResult:
    if total.shape != target.shape:
        raise ArgumentError(f"shape mismatch: propagator {total.shape} vs target {target.shape}")
    dim = target.shape[-1]
    trace = np.trace(dagger(target) @ total)
    magnitude = abs(trace)
    fid = magnitude / dim
    if magnitude <= DEGENERATE_TRACE_TOL:
        logger.debug("Zero overlap with target; phase set to 0 and flagged degenerate")
        return FidelityResult(fidelity=fid, error=1.0 - fid, phase=0.0, degenerate=True)
    return FidelityResult(fidelity=fid, error=1.0 - fid, phase=float(np.angle(trace)))


def fidelity(props: PropagatorSet, target: Operator) -> FidelityResult:
    """F = |Tr(U_f† Φ^(κ,0))|/N, ε = 1 - F, φ = arg Tr(U_f† Φ^(κ,0))"""
    return fidelity_of(props.total, target)


def total_propagator(hamiltonians: Operator, delta_t: float) -> Operator:
    """누적곱을 저장하지 않고 Φ^(κ,0) 만 계산"""
    values, vectors = hermitian_eigensystem(hamiltonians)
    steps = propagators_from_eigensystem(values, vectors, delta_t)
    total = np.eye(hamiltonians.shape[-1], dtype=complex)
    for step in steps:
        total = step @ total
    return total


def default_directions(unc: UncertaintyStructure, kappa: int) -> DirectionSequence:
    """활성 슬롯에 균등한 가중치를 준 시간 불변 방향"""
    return DirectionSequence.constant(kappa, unc.mask_array)


def perturbed_error(
    spec: ProblemSpec,
    ctrl: Controller,
    unc: UncertaintyStructure,
    delta: float,
    dirs: Optional[DirectionSequence] = None,
) -> float:
    """섭동된 충실도 오차 ε̃(δ)

    각 구간 해밀토니안을 H^(k) + δ Σ_m s_m^(k) Ĥ_m α_m^(k) 로 바꿔 전파합니다.
    dirs를 생략하면 활성 슬롯에 균등한 시간 불변 방향을 사용합니다.
    """
    if unc.dim != spec.dim:
        raise ArgumentError(f"structure dimension {unc.dim} does not match problem {spec.dim}")
    h = step_hamiltonians(spec, ctrl)
    if delta != 0.0:
        dirs = dirs if dirs is not None else default_directions(unc, ctrl.kappa)
        h = h + delta * perturbation_terms(unc, unc.alpha(ctrl), dirs)
    return fidelity_of(total_propagator(h, ctrl.delta_t), spec.target).error
