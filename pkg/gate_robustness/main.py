"""Gate Robustness 명령행 도구

하위 명령:
    synthesize  제어기 집합 합성 (제어기 JSON + 색인 CSV)
    analyze     제어기별 B_vu, B_static, ‖S‖, δ̄ 계산 (강건성 CSV)
    stats       강건성 CSV에 대한 단측 상관 검정 (+ 산점도)
    problems    벤치마크 문제 목록 출력

종료 코드: 0 성공, 1 사용법 오류, 2 입출력 오류, 3 수치 계약 위반, 4 합성 결과 없음
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, NoReturn, Optional

from .config import RunConfig, SearchConfig, StudyConfig, SynthesisConfig, threads_from_env
from .errors import DegenerateSampleError, GateRobustnessError
from .models import Tail
from .problems import problem_registry
from .storage import controller_files
from .tracing import initialize_tracing
from .workflow import PAIRS, StudyWorkflow

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_SURVIVORS = 4


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", type=int, default=1, help="문제 번호 (1-9)")
    parser.add_argument("--tf", type=float, default=3.0, help="게이트 동작 시간 t_f")
    parser.add_argument("--kappa", type=int, default=64, help="시간 구간 수 κ")
    parser.add_argument("--out", type=Path, default=Path("runs"), help="출력 디렉터리")
    parser.add_argument("--override", action="store_true", help="t_f, κ 허용값 검사 생략")


class _Parser(argparse.ArgumentParser):
    """사용법 오류를 종료 코드 1로 보고하는 파서"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gate-robustness",
        description="양자 게이트 제어기 합성 및 구조적 불확실성 강건성 분석",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="DEBUG 로그 출력")
    parser.add_argument("--no-tracing", action="store_true", help="Langfuse 추적 비활성화")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synthesize", help="제어기 집합 합성")
    _add_run_arguments(synth)
    synth.add_argument("--restarts", type=int, default=100, help="독립 재시작 횟수")
    synth.add_argument("--seed", type=int, default=0, help="마스터 난수 시드")
    synth.add_argument(
        "--init", choices=["uniform", "standard-normal", "zeros"], default="uniform",
        help="초기값 생성 방식",
    )
    synth.add_argument(
        "--method", choices=["quasi-newton", "trust-region"], default="quasi-newton",
        help="최적화 알고리즘",
    )
    synth.add_argument("--zero-start", action="store_true", help="재시작 0을 영 제어장에서 시작")
    synth.add_argument("--max-iters", type=int, default=5000, help="재시작당 최대 반복 횟수")
    synth.add_argument("--grad-tol", type=float, default=1e-9, help="기울기 수렴 기준")
    synth.add_argument("--filter", type=float, default=1e-2, help="유지할 최대 오차 ε")

    analyze = sub.add_parser("analyze", help="제어기별 강건성 분석")
    _add_run_arguments(analyze)
    analyze.add_argument(
        "controllers", nargs="*", type=Path,
        help="제어기 JSON 파일 또는 디렉터리 (생략하면 <out>/controllers)",
    )
    analyze.add_argument("--epsilon", type=float, default=0.1, help="성능 임계값 ϵ")
    analyze.add_argument("--step", type=float, default=None, help="탐색 간격 𝚍 (생략하면 자동)")
    analyze.add_argument("--max-steps", type=int, default=10_000, help="탐색 최대 단계 수")
    analyze.add_argument("--structure", type=Path, default=None, help="불확실성 구조 JSON")
    analyze.add_argument("--traces", action="store_true", help="제어기별 탐색 경로 CSV 저장")

    stats = sub.add_parser("stats", help="상관 가설 검정")
    stats.add_argument("records", nargs="+", type=Path, help="강건성 CSV 파일")
    stats.add_argument("--pair", choices=sorted(PAIRS), default="bvu-error", help="검정할 지표 쌍")
    stats.add_argument("--tail", choices=[t.value for t in Tail], default=None, help="단측 방향")
    stats.add_argument("--test", choices=["pearson", "kendall"], default=None, help="검정 종류")
    stats.add_argument("--svg", action="store_true", help="SVG 산점도와 프로파일 저장")
    stats.add_argument("--out", type=Path, default=Path("runs"), help="출력 디렉터리")

    sub.add_parser("problems", help="벤치마크 문제 목록")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    synthesis = SynthesisConfig(
        init=getattr(args, "init", "uniform"),
        seed=getattr(args, "seed", 0),
        max_iters=getattr(args, "max_iters", 5000),
        grad_tol=getattr(args, "grad_tol", 1e-9),
        fidelity_filter=getattr(args, "filter", 1e-2),
        method=getattr(args, "method", "quasi-newton"),
        include_zero_start=getattr(args, "zero_start", False),
    )
    search = SearchConfig(
        epsilon=getattr(args, "epsilon", 0.1),
        step=getattr(args, "step", None),
        max_iter=getattr(args, "max_steps", 10_000),
    )
    return RunConfig(
        problem=getattr(args, "problem", 1),
        t_f=getattr(args, "tf", 3.0),
        kappa=getattr(args, "kappa", 64),
        restarts=getattr(args, "restarts", 0),
        output_dir=args.out if hasattr(args, "out") else Path("runs"),
        structure_file=getattr(args, "structure", None),
        override=getattr(args, "override", False),
        synthesis=synthesis,
        search=search,
    )


def print_problems() -> None:
    print("문제  Q  t_f 허용값          κ 허용값        설명")
    for label, t in problem_registry().items():
        tfs = ", ".join(f"{v:g}" for v in t.tf_options)
        kappas = ", ".join(str(v) for v in t.kappa_options)
        print(f"{label:>4}  {t.n_qubits}  {tfs:<18}  {kappas:<14}  {t.description}")


async def cmd_synthesize(workflow: StudyWorkflow) -> int:
    outcome = await workflow.run_synthesis()
    print(f"✅ {len(outcome.records)}/{outcome.attempted} 제어기 저장: {workflow.controller_dir}")
    print(f"📄 색인: {outcome.index_path}")
    if outcome.records:
        best = min(outcome.records, key=lambda r: r.error)
        print(f"   최소 오차: {best.error:.3e} ({best.controller_id})")
        return EXIT_OK
    print("⚠️  필터를 통과한 제어기가 없습니다.")
    return EXIT_NO_SURVIVORS


async def cmd_analyze(workflow: StudyWorkflow, paths: List[Path]) -> int:
    files = controller_files(paths or [workflow.controller_dir])
    outcome = await workflow.run_analysis(files)
    print(f"✅ {len(outcome.records)}개 제어기 분석 완료: {outcome.csv_path}")
    for path, message in outcome.failures:
        print(f"❌ {path}: {message}")
    return EXIT_OK


async def cmd_stats(workflow: StudyWorkflow, args: argparse.Namespace) -> int:
    outcome = await workflow.run_stats(
        args.records, pair=args.pair, tail=args.tail, method=args.test, svg=args.svg
    )
    for row in outcome.rows:
        if row.get("error"):
            print(f"❌ {row['source']}: {row['error']}")
        else:
            print(
                f"📊 {row['source']}: n={row['n']} {row['method']} "
                f"coef={row['coefficient']:.3f} stat={row['statistic']:.3f} p={row['p_value']:.4f}"
            )
    print(f"📄 결과: {outcome.csv_path}")
    for figure in outcome.figures:
        print(f"🖼  {figure}")
    return DegenerateSampleError.exit_code if outcome.failed else EXIT_OK


async def main(argv: Optional[List[str]] = None) -> int:
    """메인 실행 함수"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.command == "problems":
        print_problems()
        return EXIT_OK

    try:
        config = _run_config(args)
        study = StudyConfig(
            workers=threads_from_env(),
            tracing=not args.no_tracing,
            write_traces=getattr(args, "traces", False),
        )
    except GateRobustnessError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code

    if study.tracing:
        initialize_tracing()
    workflow = StudyWorkflow(config, study)
    try:
        if args.command == "synthesize":
            return await cmd_synthesize(workflow)
        if args.command == "analyze":
            return await cmd_analyze(workflow, args.controllers)
        return await cmd_stats(workflow, args)
    except GateRobustnessError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("\n⏹️  사용자에 의해 중단되었습니다.")
        return EXIT_USAGE
    finally:
        workflow.close()


def run() -> None:
    """콘솔 스크립트 진입점"""
    sys.exit(asyncio.run(main()))


if __name__ == "__main__":
    run()
