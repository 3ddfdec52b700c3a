"""Gate Robustness 메인 실행 파일

설치하지 않은 체크아웃에서 `python main.py <하위 명령>` 으로 명령행 도구를 실행합니다.
"""

from dotenv import load_dotenv

from gate_robustness.main import run

# .env 파일 로드
load_dotenv()


if __name__ == "__main__":
    run()
