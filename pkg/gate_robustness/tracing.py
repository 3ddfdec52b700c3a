"""Langfuse 통합을 위한 추적 모듈

합성, 분석, 통계 단계를 Langfuse 스팬으로 기록합니다. 키가 없거나 패키지가
설치되지 않았으면 모든 호출은 아무 일도 하지 않습니다.
"""

import logging
import os
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

logger = logging.getLogger(__name__)

# Langfuse 클라이언트를 지연 로드하여 의존성 문제 방지
langfuse_client: Optional[Any] = None


def _get_langfuse_client() -> Optional[Any]:
    """Langfuse 클라이언트를 지연 로드"""
    global langfuse_client
    if langfuse_client is None:
        try:
            from langfuse import Langfuse  # type: ignore

            public_key = os.getenv("LANGFUSE_PUBLIC_KEY")
            secret_key = os.getenv("LANGFUSE_SECRET_KEY")
            host = os.getenv("LANGFUSE_HOST", "https://cloud.langfuse.com")

            if not public_key or not secret_key:
                logger.warning("Langfuse API 키가 설정되지 않았습니다.")
                return None

            langfuse_client = Langfuse(public_key=public_key, secret_key=secret_key, host=host)

        except ImportError:
            logger.warning("Langfuse가 설치되지 않았습니다.")
            return None
        except Exception as e:
            logger.error(f"Langfuse 클라이언트 생성 오류: {e}")
            return None

    return langfuse_client


def _safe_payload(data: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    safe: Dict[str, Any] = {}
    for key, value in (data or {}).items():
        if value is None:
            continue
        safe[key] = value if isinstance(value, (str, int, float, bool, list, dict)) else str(value)
    return safe


class TracingManager:
    """Langfuse 추적 관리자"""

    def __init__(self) -> None:
        self.enabled = False
        self.current_span: Any = None

    def initialize(self) -> bool:
        """Langfuse 추적 초기화"""
        try:
            client = _get_langfuse_client()
            if not client:
                logger.info("Langfuse 추적이 비활성화되었습니다. (API 키 확인 필요)")
                return False

            if client.auth_check():
                logger.info("Langfuse 클라이언트가 인증되었습니다.")
                self.enabled = True
                return True
            logger.error("Langfuse 인증에 실패했습니다.")
            return False

        except Exception as e:
            logger.error(f"Langfuse 초기화 중 오류 발생: {e}")
            return False

    @contextmanager
    def trace_run(self, name: str, metadata: Optional[Dict[str, Any]] = None) -> Iterator[Any]:
        """연구 단계 하나를 스팬으로 감싸는 컨텍스트 관리자"""
        client = _get_langfuse_client() if self.enabled else None
        if not client:
            yield None
            return

        try:
            span_cm = client.start_as_current_span(
                name=name, input=_safe_payload(metadata), metadata={"package": "gate_robustness"}
            )
            span = span_cm.__enter__()
        except Exception as e:
            logger.error(f"추적 스팬 생성 오류: {e}")
            yield None
            return

        previous, self.current_span = self.current_span, span
        logger.debug(f"Tracing span started: {name}")
        try:
            yield span
        finally:
            self.current_span = previous
            try:
                span_cm.__exit__(None, None, None)
            except Exception as e:
                logger.error(f"추적 완료 처리 오류: {e}")

    def log_event(self, name: str, data: Optional[Dict[str, Any]] = None, level: str = "DEFAULT") -> None:
        """현재 스팬에 이벤트 기록"""
        if not self.enabled or self.current_span is None:
            return
        try:
            client = _get_langfuse_client()
            if client:
                client.create_event(name=name, metadata=_safe_payload(data), level=level)
        except Exception as e:
            logger.error(f"이벤트 로깅 오류: {e}")

    def close(self) -> None:
        """리소스 정리"""
        if self.enabled:
            try:
                client = _get_langfuse_client()
                if client:
                    client.flush()
                logger.info("Langfuse 클라이언트가 정리되었습니다.")
            except Exception as e:
                logger.error(f"Langfuse 클라이언트 정리 오류: {e}")


# 전역 추적 관리자 인스턴스
tracing_manager = TracingManager()


def get_tracing_manager() -> TracingManager:
    """추적 관리자 인스턴스 반환"""
    return tracing_manager


def initialize_tracing() -> bool:
    """추적 초기화 편의 함수"""
    return tracing_manager.initialize()
