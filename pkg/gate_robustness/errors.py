"""Gate Robustness 예외 정의

각 예외는 CLI 종료 코드를 함께 가지고 있습니다.
(0 성공, 1 사용법 오류, 2 입출력 오류, 3 수치 계약 위반)
"""


class GateRobustnessError(Exception):
    """패키지 공통 기본 예외"""

    exit_code: int = 3


class ArgumentError(GateRobustnessError, ValueError):
    """잘못된 인자, 차원 불일치, 허용 범위 위반"""

    exit_code = 1


class ContractError(GateRobustnessError):
    """수치 계약 위반 (에르미트/유니터리 조건 등)"""

    exit_code = 3


class PhaseUndefinedError(ContractError):
    """Tr[U_f† Φ] = 0 이라 전역 위상이 정의되지 않는 경우"""

    def __init__(self, message: str = "phase-undefined") -> None:
        super().__init__(message)


class LogSensitivityUndefinedError(ContractError):
    """공칭 오차가 0이라 로그 민감도를 정의할 수 없는 경우"""

    def __init__(self, message: str = "log-sensitivity undefined at zero error") -> None:
        super().__init__(message)


class SynthesisAbortedError(ContractError):
    """최적화 도중 비유한(non-finite) 오차가 발생한 경우"""


class DegenerateSampleError(GateRobustnessError, ValueError):
    """상관 검정에 사용할 수 없는 표본 (분산 0, 전부 동순위 등)"""

    exit_code = 3

    def __init__(self, message: str = "degenerate sample") -> None:
        super().__init__(message)


class InsufficientSampleError(DegenerateSampleError):
    """표본 수가 3 미만"""

    def __init__(self, message: str = "insufficient sample") -> None:
        super().__init__(message)


class StorageError(GateRobustnessError, OSError):
    """파일 읽기/쓰기 실패 또는 형식 오류"""

    exit_code = 2
