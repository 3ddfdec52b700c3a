"""제어기 집합에 대한 단측 상관 가설 검정

Pearson r 은 자유도 n-2 의 Student-t 기준, Kendall τ-b 는 동순위 보정 분산을
사용한 정규 근사로 단측 p-값을 계산합니다.
"""

import logging
from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray
from scipy import stats as scistats

from .errors import ArgumentError, DegenerateSampleError, InsufficientSampleError
from .models import CorrelationResult, Tail

logger = logging.getLogger(__name__)

SIGNIFICANCE_LEVEL = 0.05
MIN_SAMPLE = 3

Sample = Union[Sequence[float], NDArray[np.float64]]


def _coerce_tail(tail: Union[Tail, str]) -> Tail:
    try:
        return Tail(tail)
    except ValueError:
        raise ArgumentError(f"tail must be 'negative' or 'positive', got {tail!r}") from None


def _prepare(x: Sample, y: Sample) -> tuple:
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise ArgumentError(f"samples must be 1-D of equal length, got {xa.shape} and {ya.shape}")
    if xa.size < MIN_SAMPLE:
        raise InsufficientSampleError()
    if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(ya))):
        raise ArgumentError("samples must be finite")
    return xa, ya


def _one_tailed(cdf: float, sf: float, tail: Tail) -> float:
    return float(np.clip(cdf if tail is Tail.NEGATIVE else sf, 0.0, 1.0))


def pearson_statistic(r: float, n: int, tail: Union[Tail, str] = Tail.NEGATIVE) -> tuple:
    """r 과 표본 수에서 (t 통계량, 단측 p) 계산

    t = r √((n-2)/(1-r²)), |r| = 1 이면 ±inf.
    """
    tail = _coerce_tail(tail)
    if n < MIN_SAMPLE:
        raise InsufficientSampleError()
    if not -1.0 <= r <= 1.0:
        raise ArgumentError(f"r must lie in [-1, 1], got {r}")
    dof = n - 2
    denom = 1.0 - r * r
    if denom <= 0.0:
        statistic = float(np.copysign(np.inf, r))
    else:
        statistic = float(r * np.sqrt(dof / denom))
    p = _one_tailed(scistats.t.cdf(statistic, dof), scistats.t.sf(statistic, dof), tail)
    return statistic, p


def pearson_test(x: Sample, y: Sample, tail: Union[Tail, str] = Tail.NEGATIVE) -> CorrelationResult:
    """Pearson r 단측 검정

    Raises:
        InsufficientSampleError: n < 3
        DegenerateSampleError: 어느 한쪽 분산이 0
    """
    tail = _coerce_tail(tail)
    xa, ya = _prepare(x, y)
    if np.ptp(xa) == 0.0 or np.ptp(ya) == 0.0:
        raise DegenerateSampleError()
    r = float(np.clip(scistats.pearsonr(xa, ya)[0], -1.0, 1.0))
    statistic, p = pearson_statistic(r, xa.size, tail)
    return CorrelationResult(
        n=int(xa.size),
        coefficient=r,
        statistic=statistic,
        p_value=p,
        tail=tail,
        significant=p < SIGNIFICANCE_LEVEL,
        method="pearson",
    )


def kendall_test(x: Sample, y: Sample, tail: Union[Tail, str] = Tail.NEGATIVE) -> CorrelationResult:
    """Kendall τ-b 단측 검정 (동순위 보정 정규 근사)

    동순위가 없으면 z = 3τ√(n(n-1))/√(2(2n+5)) 와 같습니다.
    p 가 0 으로 언더플로되면 z 는 ±inf 입니다.
    """
    tail = _coerce_tail(tail)
    xa, ya = _prepare(x, y)
    if np.ptp(xa) == 0.0 or np.ptp(ya) == 0.0:
        raise DegenerateSampleError()

    n = xa.size
    alternative = "less" if tail is Tail.NEGATIVE else "greater"
    res = scistats.kendalltau(xa, ya, variant="b", method="asymptotic", alternative=alternative)
    if not (np.isfinite(res.statistic) and np.isfinite(res.pvalue)):
        raise DegenerateSampleError()
    tau = float(np.clip(res.statistic, -1.0, 1.0))
    p = float(np.clip(res.pvalue, 0.0, 1.0))
    # 단측 p 에서 되돌린 z
    z = float(scistats.norm.ppf(p) if tail is Tail.NEGATIVE else scistats.norm.isf(p))
    logger.debug(f"Kendall tau={tau:.4f}, z={z:.4f}, p={p:.4g} (n={n}, tail={tail.value})")
    return CorrelationResult(
        n=int(n),
        coefficient=tau,
        statistic=z,
        p_value=p,
        tail=tail,
        significant=p < SIGNIFICANCE_LEVEL,
        method="kendall",
    )
