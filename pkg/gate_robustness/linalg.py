"""복소 밀집 행렬 커널

에르미트 연산자, 유니터리 지수, 행렬 지수의 Fréchet 미분, Haar 무작위 유니터리,
Pauli 텐서 임베딩을 제공합니다. 모든 함수는 순수 함수이며 ħ = 1 단위계를 사용합니다.
"""

from functools import reduce
from typing import Literal, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import linalg as sla

from .errors import ArgumentError, ContractError

Operator = NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

Axis = Literal["x", "y", "z"]


def dagger(a: NDArray) -> NDArray:
    """마지막 두 축에 대한 켤레 전치 (배치 지원)"""
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_error(a: NDArray) -> float:
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def unitarity_error(u: NDArray) -> float:
    n = u.shape[-1]
    return float(np.max(np.abs(dagger(u) @ u - np.eye(n))))


def is_hermitian(a: NDArray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(a) < tol


def is_unitary(u: NDArray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(u) < tol


def require_hermitian(a: NDArray, name: str = "operator") -> None:
    """에르미트가 아니면 ContractError"""
    err = hermiticity_error(a)
    if err >= HERMITIAN_TOL:
        raise ContractError(f"{name} is not Hermitian (max|A - A†| = {err:.3e})")


def pauli_embed(axis: Axis, site: int, n_qubits: int) -> Operator:
    """σ_axis를 site 위치(1부터 시작, 1이 최상위 인자)에 둔 Q겹 텐서곱

    Args:
        axis: "x", "y", "z" 중 하나
        site: 1 ≤ site ≤ n_qubits
        n_qubits: 큐비트 수 Q

    Returns:
        2^Q × 2^Q 에르미트 연산자
    """
    if axis not in PAULI:
        raise ArgumentError(f"unknown Pauli axis {axis!r}")
    if not 1 <= site <= n_qubits:
        raise ArgumentError(f"site must satisfy 1 <= site <= {n_qubits}, got {site}")
    factors = [PAULI[axis] if ell == site else I2 for ell in range(1, n_qubits + 1)]
    return reduce(np.kron, factors)


def hermitian_eigensystem(h: NDArray) -> Tuple[NDArray[np.float64], Operator]:
    """에르미트 행렬(또는 그 배치)의 고유값 분해 H = V Λ V†"""
    values, vectors = np.linalg.eigh(h)
    return values, vectors


def propagators_from_eigensystem(
    values: NDArray[np.float64], vectors: Operator, dt: float
) -> Operator:
    """exp(-i H dt) = V e^{-iΛdt} V† (배치 지원)"""
    phases = np.exp(-1j * values * dt)
    return (vectors * phases[..., None, :]) @ dagger(vectors)


def expm_step(h: Operator, dt: float) -> Operator:
    """구간 길이 dt 동안의 전파자 exp(-i H dt)

    Raises:
        ContractError: H가 에르미트가 아닌 경우
    """
    h = np.asarray(h, dtype=complex)
    require_hermitian(h, "H")
    if not np.isfinite(dt):
        raise ArgumentError(f"dt must be finite, got {dt}")
    values, vectors = hermitian_eigensystem(h)
    return propagators_from_eigensystem(values, vectors, dt)


def frechet_kernel(values: NDArray[np.float64], dt: float) -> Operator:
    """고유기저에서의 Fréchet 적분 핵

    G_ij = -i dt e^{-i(λ_i+λ_j)dt/2} sinc((λ_i-λ_j)dt/2)
    고유기저 성분 W = V†ĤV에 대해 X = V (W ∘ G) V† 입니다.
    sinc 형태라 (준)축퇴 고유값에서도 상쇄 오차가 없습니다.
    """
    li = values[..., :, None]
    lj = values[..., None, :]
    return -1j * dt * np.exp(-0.5j * (li + lj) * dt) * np.sinc((li - lj) * dt / (2.0 * np.pi))


def frechet_step_spectral(
    values: NDArray[np.float64],
    vectors: Operator,
    h_hat: Operator,
    scale: float,
    dt: float,
) -> Operator:
    """이미 계산된 고유분해를 재사용하는 Fréchet 미분"""
    w = dagger(vectors) @ h_hat @ vectors
    return scale * (vectors @ (w * frechet_kernel(values, dt)) @ dagger(vectors))


def frechet_step(h: Operator, h_hat: Operator, scale: float, dt: float) -> Operator:
    """X = -i·scale·∫_0^dt e^{-iH(dt-τ)} Ĥ e^{-iHτ} dτ

    exp(-i(H + δ·scale·Ĥ)dt)의 δ=0에서의 방향 미분과 같습니다.
    블록 상삼각 행렬 [[-iH dt, -i scale Ĥ dt], [0, -iH dt]]의 지수에서
    비대각 블록을 읽는 방식(scipy의 blockEnlarge)으로 계산합니다.
    """
    h = np.asarray(h, dtype=complex)
    h_hat = np.asarray(h_hat, dtype=complex)
    require_hermitian(h, "H")
    require_hermitian(h_hat, "Hhat")
    if h.shape != h_hat.shape:
        raise ArgumentError(f"shape mismatch: H {h.shape} vs Hhat {h_hat.shape}")
    a = -1j * h * dt
    e = -1j * scale * h_hat * dt
    return sla.expm_frechet(a, e, method="blockEnlarge", compute_expm=False)


def haar_unitary(dim: int, seed: int) -> Operator:
    """Haar 측도를 따르는 dim × dim 무작위 유니터리

    numpy의 PCG64(default_rng)로 복소 Ginibre 행렬을 만들고 QR 분해 후
    R 대각 성분의 위상을 Q에 흡수하여 분해를 유일하게 만듭니다.
    같은 seed는 같은 행렬을 반환합니다.
    """
    if dim < 1:
        raise ArgumentError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = sla.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def frobenius_normalize(a: Operator) -> Operator:
    """Frobenius 노름 1로 정규화 (영행렬은 ArgumentError)"""
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise ArgumentError("cannot normalize a zero operator")
    return a / norm
