"""최소 성능 위반 섭동 탐색

최악 방향을 따라 섭동 세기를 일정 간격 𝚍 로 늘려 가며 ε̃(δ) < ϵ 을 유지하는
가장 큰 δ̄ 를 찾습니다. 매 단계마다 섭동된 해밀토니안에서 최악 방향을 다시
계산하므로 경로는 고정된 반직선이 아니라 꺾은선입니다.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from .config import SearchConfig
from .dynamics import (
    fidelity,
    fidelity_of,
    perturbation_terms,
    propagate_hamiltonians,
    step_hamiltonians,
    total_propagator,
)
from .errors import ArgumentError
from .linalg import Operator
from .models import (
    Controller,
    DeltaSearchResult,
    DirectionSequence,
    StepChoice,
    Termination,
    UncertaintyStructure,
)
from .problems import ProblemSpec
from .sensitivity import bound_vu, z_from_propagators

logger = logging.getLogger(__name__)

LADDER_TOP_EXPONENT = -1.0
LADDER_RATIO_EXPONENT = 0.25
ERROR_FLOOR = 1e-12


def step_ladder(floor: float = 1e-6) -> NDArray[np.float64]:
    """10^-1, 10^-1.25, 10^-1.5, ... (floor 이상)"""
    n = int(np.floor((LADDER_TOP_EXPONENT - np.log10(floor)) / LADDER_RATIO_EXPONENT + 1e-9)) + 1
    return 10.0 ** (LADDER_TOP_EXPONENT - LADDER_RATIO_EXPONENT * np.arange(max(n, 1)))


def _worst_directions(
    hamiltonians: Operator,
    delta_t: float,
    spec: ProblemSpec,
    unc: UncertaintyStructure,
    alpha: NDArray[np.float64],
) -> DirectionSequence:
    props = propagate_hamiltonians(hamiltonians, delta_t)
    z = z_from_propagators(props, spec.target, unc, alpha)
    return bound_vu(z).worst_dirs


def choose_step_size(
    spec: ProblemSpec,
    ctrl: Controller,
    unc: UncertaintyStructure,
    tolerance: float = 0.1,
    floor: float = 1e-6,
    error_floor: float = ERROR_FLOOR,
) -> StepChoice:
    """초기 최악 방향으로 𝚍 만큼 섭동했을 때 오차의 상대 변화가 tolerance 미만인
    가장 큰 간격을 사다리에서 고릅니다

    상대 변화의 분모는 max(ε, error_floor) 입니다.

    Returns:
        선택된 간격 (조건을 만족하는 값이 없으면 at_floor=True 인 floor)
    """
    h0 = step_hamiltonians(spec, ctrl)
    props = propagate_hamiltonians(h0, ctrl.delta_t)
    nominal = fidelity(props, spec.target).error
    alpha = unc.alpha(ctrl)
    dirs = bound_vu(z_from_propagators(props, spec.target, unc, alpha)).worst_dirs
    direction = perturbation_terms(unc, alpha, dirs)
    scale = max(nominal, error_floor)

    change = math.inf
    for d in step_ladder(floor):
        perturbed = fidelity_of(total_propagator(h0 + d * direction, ctrl.delta_t), spec.target)
        change = abs(perturbed.error - nominal) / scale
        if change < tolerance:
            logger.debug(f"Step size {d:.3e} accepted (relative change {change:.3e})")
            return StepChoice(step=float(d), relative_change=float(change))
    logger.warning(f"No ladder step met the {tolerance:g} relative-change rule; using floor {floor:g}")
    return StepChoice(step=floor, relative_change=float(change), at_floor=True)


def find_delta_bar(
    spec: ProblemSpec,
    ctrl: Controller,
    unc: UncertaintyStructure,
    epsilon: float,
    step: float,
    max_iter: int = 10_000,
    step_at_floor: bool = False,
) -> DeltaSearchResult:
    """ε̃(δ̄) < ϵ 를 만족하는 가장 큰 δ̄ = n̄𝚍

    Args:
        spec: 게이트 문제
        ctrl: 분석할 제어기
        unc: 불확실성 구조 (α는 공칭 제어장에서 고정)
        epsilon: 성능 임계값 ϵ
        step: 탐색 간격 𝚍
        max_iter: 최대 단계 수
        step_at_floor: 간격이 사다리 하한으로 정해졌는지 (결과에 그대로 기록)

    Returns:
        δ̄, n̄, 경로 기록(δ_n, ε̃(δ_n))과 종료 사유
    """
    if step <= 0:
        raise ArgumentError(f"step must be positive, got {step}")
    if max_iter < 1:
        raise ArgumentError(f"max_iter must be >= 1, got {max_iter}")

    h = step_hamiltonians(spec, ctrl)
    alpha = unc.alpha(ctrl)
    props = propagate_hamiltonians(h, ctrl.delta_t)
    nominal = fidelity(props, spec.target).error

    if nominal >= epsilon:
        logger.info(f"Nominal error {nominal:.3e} already violates threshold {epsilon:g}")
        return DeltaSearchResult(
            delta_bar=0.0,
            n_bar=0,
            step=step,
            threshold=epsilon,
            terminated=Termination.CROSSED,
            trace=[(0.0, nominal)],
            step_at_floor=step_at_floor,
        )

    dirs = bound_vu(z_from_propagators(props, spec.target, unc, alpha)).worst_dirs
    trace = []
    for n in range(1, max_iter + 1):
        h = h + step * perturbation_terms(unc, alpha, dirs)
        error = fidelity_of(total_propagator(h, ctrl.delta_t), spec.target).error
        trace.append((n * step, error))
        if error >= epsilon:
            return DeltaSearchResult(
                delta_bar=(n - 1) * step,
                n_bar=n - 1,
                step=step,
                threshold=epsilon,
                terminated=Termination.CROSSED,
                trace=trace,
                step_at_floor=step_at_floor,
            )
        dirs = _worst_directions(h, ctrl.delta_t, spec, unc, alpha)

    logger.warning(f"Threshold {epsilon:g} not crossed within {max_iter} steps; delta_bar is a lower bound")
    return DeltaSearchResult(
        delta_bar=max_iter * step,
        n_bar=max_iter,
        step=step,
        threshold=epsilon,
        terminated=Termination.MAX_ITERATIONS,
        trace=trace,
        step_at_floor=step_at_floor,
    )


def search_with_config(
    spec: ProblemSpec, ctrl: Controller, unc: UncertaintyStructure, config: SearchConfig
) -> DeltaSearchResult:
    """SearchConfig에 따라 간격을 정하고 탐색을 실행합니다"""
    if config.step is not None:
        return find_delta_bar(spec, ctrl, unc, config.epsilon, config.step, config.max_iter)
    choice = choose_step_size(
        spec, ctrl, unc, config.step_tolerance, config.step_floor, config.error_floor
    )
    return find_delta_bar(
        spec, ctrl, unc, config.epsilon, choice.step, config.max_iter,
        step_at_floor=choice.at_floor,
    )
