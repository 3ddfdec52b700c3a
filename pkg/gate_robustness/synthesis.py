"""고충실도 제어기 합성

제어장 배열 전체에 대해 충실도 오차 ε를 제약 없이 최소화합니다. 기울기는
민감도 계수와 같은 전/후방 누적곱 및 Fréchet 미분으로 정확히 계산합니다.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import BFGS, OptimizeResult, minimize

from .config import InitStrategy, OptimizerMethod, SynthesisConfig
from .dynamics import fidelity, propagate
from .errors import ArgumentError, ContractError, PhaseUndefinedError, SynthesisAbortedError
from .models import Controller, SynthesisResult
from .problems import ProblemSpec
from .sensitivity import trace_derivatives

logger = logging.getLogger(__name__)

UNIFORM_INIT_RANGE = (-1.0, 1.0)

Objective = Callable[[NDArray[np.float64]], Tuple[float, NDArray[np.float64]]]


def error_and_gradient(spec: ProblemSpec, ctrl: Controller) -> Tuple[float, NDArray[np.float64]]:
    """ε 와 ∂ε/∂f_m^(k) (M × κ) 를 한 번의 전파로 계산

    Raises:
        PhaseUndefinedError: Tr[U_f† Φ] = 0 인 경우
    """
    props = propagate(spec, ctrl)
    fid = fidelity(props, spec.target)
    if fid.degenerate:
        raise PhaseUndefinedError()
    if spec.n_controls == 0:
        return fid.error, np.zeros((0, ctrl.kappa))
    traces = trace_derivatives(props, spec.target, spec.control_stack)
    factor = -np.exp(-1j * fid.phase) / props.dim
    return fid.error, np.real(factor * traces).T


def gradient_error(spec: ProblemSpec, ctrl: Controller) -> NDArray[np.float64]:
    """∂ε/∂f_m^(k), shape (M, κ)"""
    return error_and_gradient(spec, ctrl)[1]


def initial_fields(
    n_controls: int, kappa: int, init: InitStrategy, rng: np.random.Generator
) -> NDArray[np.float64]:
    if init is InitStrategy.UNIFORM:
        return rng.uniform(*UNIFORM_INIT_RANGE, size=(n_controls, kappa))
    if init is InitStrategy.STANDARD_NORMAL:
        return rng.standard_normal((n_controls, kappa))
    return np.zeros((n_controls, kappa))


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """(마스터 시드, 재시작 번호)에서 파생한 독립 난수 스트림"""
    return np.random.default_rng([seed, restart])


def _objective(spec: ProblemSpec, t_f: float, kappa: int) -> Objective:
    shape = (spec.n_controls, kappa)

    def fun(x: NDArray[np.float64]) -> Tuple[float, NDArray[np.float64]]:
        if not np.all(np.isfinite(x)):
            raise SynthesisAbortedError("non-finite control amplitudes during line search")
        error, grad = error_and_gradient(spec, Controller(x.reshape(shape), t_f))
        if not np.isfinite(error):
            raise SynthesisAbortedError(f"non-finite fidelity error {error}")
        return error, grad.ravel()

    return fun


def _minimize(fun: Objective, x0: NDArray[np.float64], config: SynthesisConfig) -> OptimizeResult:
    if config.method is OptimizerMethod.TRUST_REGION:
        return minimize(
            fun,
            x0,
            jac=True,
            hess=BFGS(),
            method="trust-constr",
            options={"gtol": config.grad_tol, "maxiter": max(config.max_iters, 1)},
        )
    # BFGS 의 gtol 은 기울기 무한대 노름 기준
    return minimize(
        fun,
        x0,
        jac=True,
        method="BFGS",
        options={"gtol": config.grad_tol, "maxiter": config.max_iters},
    )


def optimize(
    spec: ProblemSpec,
    t_f: float,
    kappa: int,
    config: Optional[SynthesisConfig] = None,
    restart: int = 0,
) -> SynthesisResult:
    """재시작 하나에 대한 준뉴턴 최소화

    Args:
        spec: 게이트 문제
        t_f: 게이트 동작 시간
        kappa: 시간 구간 수
        config: 합성 설정
        restart: 재시작 번호 (난수 스트림과 초기화 방식을 결정)

    Returns:
        최종 제어기, ε, 반복 횟수, 수렴 여부

    Raises:
        SynthesisAbortedError: 탐색 중 비유한 오차가 발생한 경우
    """
    config = config or SynthesisConfig()
    if kappa < 1:
        raise ArgumentError(f"kappa must be >= 1, got {kappa}")
    if t_f <= 0:
        raise ArgumentError(f"t_f must be positive, got {t_f}")

    init = config.init
    if config.include_zero_start and restart == 0:
        init = InitStrategy.ZEROS
    x0 = initial_fields(spec.n_controls, kappa, init, restart_rng(config.seed, restart))

    fun = _objective(spec, t_f, kappa)
    if spec.n_controls == 0 or config.max_iters == 0:
        x, iterations = x0.ravel(), 0
    else:
        result = _minimize(fun, x0.ravel(), config)
        x, iterations = result.x, int(result.nit)

    ctrl = Controller(x.reshape(spec.n_controls, kappa), t_f)
    error, grad = fun(ctrl.fields.ravel())
    converged = bool(grad.size == 0 or np.max(np.abs(grad)) < config.grad_tol)
    logger.debug(
        f"Restart {restart}: eps={error:.3e}, iterations={iterations}, converged={converged}"
    )
    return SynthesisResult(
        controller=ctrl,
        error=float(error),
        iterations=iterations,
        converged=converged,
        seed=config.seed,
        restart=restart,
        init=init.value,
        method=config.method.value,
    )


def batch_synthesize(
    spec: ProblemSpec,
    t_f: float,
    kappa: int,
    count: int,
    config: Optional[SynthesisConfig] = None,
) -> List[SynthesisResult]:
    """독립 재시작 count 회를 실행하고 ε < fidelity_filter 인 제어기만 반환

    결과는 재시작 번호 순서입니다. 중단된 재시작은 경고와 함께 제외됩니다.
    """
    config = config or SynthesisConfig()
    if count < 0:
        raise ArgumentError(f"count must be >= 0, got {count}")

    def run_one(restart: int) -> Optional[SynthesisResult]:
        try:
            return optimize(spec, t_f, kappa, config, restart)
        except ContractError as e:
            logger.warning(f"Restart {restart} aborted: {e}")
            return None

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        results = list(executor.map(run_one, range(count)))

    survivors = [r for r in results if r is not None and r.error < config.fidelity_filter]
    logger.info(
        f"Problem {spec.label}, t_f={t_f:g}, kappa={kappa}: "
        f"{len(survivors)}/{count} restarts below eps={config.fidelity_filter:g}"
    )
    if not survivors:
        logger.warning("No controller passed the fidelity filter")
    return survivors
