"""Gate Robustness Study Workflow

합성 → 강건성 분석 → 상관 검정으로 이어지는 연구 단계를 정의합니다.
제어기 단위 작업은 스레드 풀에서 실행되고, 결과는 제어기 식별자 순서로 정렬된 뒤
기록됩니다.
"""

import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .config import RunConfig, SearchConfig, StudyConfig
from .errors import ArgumentError, DegenerateSampleError, GateRobustnessError
from .models import (
    ControllerRecord,
    CorrelationResult,
    DeltaSearchResult,
    RobustnessRecord,
    Tail,
    Termination,
    UncertaintyStructure,
)
from .plots import profile_svg, scatter_svg
from .problems import ProblemSpec, build_problem, validate_timing
from .search import search_with_config
from .sensitivity import default_structure, sensitivity_report
from .stats import kendall_test, pearson_test
from .storage import (
    correlation_row,
    load_controller,
    load_uncertainty_structure,
    read_robustness_records,
    save_controller,
    write_correlation_rows,
    write_index,
    write_robustness_records,
    write_scatter_data,
    write_search_trace,
)
from .synthesis import batch_synthesize
from .tracing import get_tracing_manager

logger = logging.getLogger(__name__)

CONTROLLER_DIR = "controllers"
INDEX_FILE = "index.csv"
ROBUSTNESS_FILE = "robustness.csv"
CORRELATION_FILE = "correlation.csv"
TRACE_DIR = "traces"


@dataclass(frozen=True)
class MetricPair:
    """상관 검정에 쓰는 (x, y) 지표 쌍과 기본 검정 방향"""

    name: str
    x: str
    y: str
    tail: Tail
    method: str
    x_label: str
    y_label: str


PAIRS: Dict[str, MetricPair] = {
    p.name: p
    for p in (
        MetricPair("bvu-error", "b_vu", "error", Tail.POSITIVE, "pearson", "B_vu", "fidelity error"),
        MetricPair("bvu-delta", "b_vu", "delta_bar", Tail.NEGATIVE, "pearson", "B_vu", "delta_bar"),
        MetricPair(
            "logsens-error", "log_sens_norm", "error", Tail.NEGATIVE, "kendall",
            "log-sensitivity norm", "fidelity error",
        ),
    )
}

TESTS: Dict[str, Callable[..., CorrelationResult]] = {
    "pearson": pearson_test,
    "kendall": kendall_test,
}


@dataclass
class SynthesisOutcome:
    records: List[ControllerRecord]
    paths: List[Path]
    index_path: Path
    attempted: int


@dataclass
class AnalysisOutcome:
    records: List[RobustnessRecord]
    failures: List[Tuple[Path, str]] = field(default_factory=list)
    csv_path: Optional[Path] = None


@dataclass
class StatsOutcome:
    rows: List[dict]
    csv_path: Path
    figures: List[Path] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(row.get("error") for row in self.rows)


def analyze_controller(
    spec: ProblemSpec,
    record: ControllerRecord,
    unc: UncertaintyStructure,
    search: SearchConfig,
    t_f: Optional[float] = None,
    kappa: Optional[int] = None,
) -> Tuple[RobustnessRecord, DeltaSearchResult]:
    """제어기 하나의 민감도 지표와 δ̄ 계산

    t_f, kappa를 주면 제어기의 시간 격자가 같아야 합니다.

    Raises:
        ArgumentError: 제어기가 문제나 시간 격자와 맞지 않는 경우
    """
    if spec.label and record.problem != spec.label:
        raise ArgumentError(
            f"{record.controller_id} belongs to problem {record.problem}, not {spec.label}"
        )
    ctrl = record.to_controller()
    if ctrl.n_controls != spec.n_controls:
        raise ArgumentError(
            f"{record.controller_id} has {ctrl.n_controls} control rows, "
            f"problem {spec.label} has {spec.n_controls}"
        )
    other_tf = t_f is not None and not math.isclose(ctrl.t_f, t_f)
    if other_tf or (kappa is not None and ctrl.kappa != kappa):
        raise ArgumentError(
            f"{record.controller_id} was synthesized for t_f={ctrl.t_f:g}, kappa={ctrl.kappa}; "
            f"expected t_f={t_f}, kappa={kappa}"
        )
    report = sensitivity_report(spec, ctrl, unc)
    result = search_with_config(spec, ctrl, unc, search)
    log_norm = report.log_sens_norm
    return (
        RobustnessRecord(
            controller_id=record.controller_id,
            problem=record.problem,
            t_f=ctrl.t_f,
            kappa=ctrl.kappa,
            error=report.fidelity.error,
            b_vu=report.b_vu,
            b_static=report.b_static,
            log_sens_norm=math.nan if log_norm is None else log_norm,
            delta_bar=result.delta_bar,
            step=result.step,
            terminated=result.terminated.value,
            step_at_floor=result.step_at_floor,
            seed=record.seed,
            restart=record.restart,
            init=record.init,
        ),
        result,
    )


class StudyWorkflow:
    """합성 → 분석 → 통계 연구 워크플로우"""

    def __init__(self, config: RunConfig, study: Optional[StudyConfig] = None) -> None:
        """워크플로우 초기화

        Args:
            config: 실행 설정 (문제, 시간, 출력 디렉터리 등)
            study: 병렬 처리와 추적 설정
        """
        self.config = config
        self.study = study or StudyConfig()
        self.tracing_manager = get_tracing_manager()
        self._spec: Optional[ProblemSpec] = None
        self._structure: Optional[UncertaintyStructure] = None

    @property
    def spec(self) -> ProblemSpec:
        if self._spec is None:
            self._spec = build_problem(self.config.problem)
        return self._spec

    @property
    def structure(self) -> UncertaintyStructure:
        if self._structure is None:
            if self.config.structure_file is not None:
                self._structure = load_uncertainty_structure(self.config.structure_file, self.spec)
            else:
                self._structure = default_structure(self.spec)
        return self._structure

    @property
    def controller_dir(self) -> Path:
        return self.config.output_dir / CONTROLLER_DIR

    async def run_synthesis(self) -> SynthesisOutcome:
        """제어기 집합 합성 후 JSON 파일과 색인 CSV 저장"""
        cfg = self.config
        validate_timing(cfg.problem, cfg.t_f, cfg.kappa, cfg.override)
        metadata = {
            "problem": cfg.problem, "t_f": cfg.t_f, "kappa": cfg.kappa,
            "restarts": cfg.restarts, "seed": cfg.synthesis.seed,
        }
        with self.tracing_manager.trace_run("synthesize", metadata):
            logger.info(
                f"Synthesizing {cfg.restarts} restarts for problem {cfg.problem} "
                f"(t_f={cfg.t_f:g}, kappa={cfg.kappa})"
            )
            results = await asyncio.to_thread(
                batch_synthesize, self.spec, cfg.t_f, cfg.kappa, cfg.restarts, cfg.synthesis
            )
            records = sorted(
                (ControllerRecord.from_result(r, cfg.problem) for r in results),
                key=lambda r: r.controller_id,
            )
            paths = [save_controller(r, self.controller_dir) for r in records]
            index_path = write_index(cfg.output_dir / INDEX_FILE, records)
            self.tracing_manager.log_event(
                "synthesis_complete", {"survivors": len(records), "attempted": cfg.restarts}
            )
        return SynthesisOutcome(records, paths, index_path, cfg.restarts)

    async def run_analysis(self, controller_paths: Sequence[Path]) -> AnalysisOutcome:
        """제어기 파일별 민감도와 δ̄ 계산 후 강건성 CSV 저장

        한 파일의 실패(차원 불일치 등)는 기록만 하고 나머지는 계속 진행합니다.
        """
        cfg = self.config
        validate_timing(cfg.problem, cfg.t_f, cfg.kappa, cfg.override)
        spec, unc = self.spec, self.structure
        trace_dir = cfg.output_dir / TRACE_DIR

        def work(path: Path) -> Tuple[Path, Optional[RobustnessRecord], str]:
            try:
                record = load_controller(path)
                row, result = analyze_controller(
                    spec, record, unc, cfg.search, t_f=cfg.t_f, kappa=cfg.kappa
                )
                if self.study.write_traces:
                    write_search_trace(
                        trace_dir / f"{record.controller_id}.csv", record.controller_id, result
                    )
                return path, row, ""
            except GateRobustnessError as e:
                return path, None, str(e)

        with self.tracing_manager.trace_run(
            "analyze", {"problem": cfg.problem, "controllers": len(controller_paths)}
        ):
            loop = asyncio.get_running_loop()
            with ThreadPoolExecutor(max_workers=self.study.workers) as executor:
                tasks = [loop.run_in_executor(executor, work, p) for p in controller_paths]
                results = await asyncio.gather(*tasks)

            outcome = AnalysisOutcome(records=[])
            for path, row, message in results:
                if row is None:
                    logger.error(f"{path}: {message}")
                    outcome.failures.append((path, message))
                else:
                    outcome.records.append(row)
            outcome.records.sort(key=lambda r: r.controller_id)
            outcome.csv_path = write_robustness_records(
                cfg.output_dir / ROBUSTNESS_FILE, outcome.records
            )
            self.tracing_manager.log_event(
                "analysis_complete",
                {"analyzed": len(outcome.records), "failed": len(outcome.failures)},
            )
        return outcome

    async def run_stats(
        self,
        record_files: Sequence[Path],
        pair: str = "bvu-error",
        tail: Optional[Tail] = None,
        method: Optional[str] = None,
        svg: bool = False,
    ) -> StatsOutcome:
        """기록 파일별 단측 상관 검정 (파일당 한 행)"""
        if pair not in PAIRS:
            raise ArgumentError(f"unknown pair {pair!r}; expected one of {sorted(PAIRS)}")
        metric = PAIRS[pair]
        tail = Tail(tail) if tail is not None else metric.tail
        method = method or metric.method
        if method not in TESTS:
            raise ArgumentError(f"unknown test {method!r}; expected one of {sorted(TESTS)}")

        out = self.config.output_dir
        rows: List[dict] = []
        groups: Dict[str, tuple] = {}
        figures: List[Path] = []
        with self.tracing_manager.trace_run("stats", {"pair": pair, "files": len(record_files)}):
            for path in map(Path, record_files):
                records = await asyncio.to_thread(read_robustness_records, path)
                rows.append(self._test_file(path, records, metric, tail, method, groups))
                if svg and records:
                    figures.append(
                        profile_svg(
                            out / f"{path.stem}-profile.svg",
                            {
                                "log-sensitivity norm": [r.log_sens_norm for r in records],
                                "B_vu": [r.b_vu for r in records],
                                "fidelity error": [r.error for r in records],
                            },
                            title=path.stem,
                        )
                    )
            csv_path = write_correlation_rows(out / CORRELATION_FILE, rows)
            if svg and groups:
                figures.append(
                    scatter_svg(out / f"scatter-{pair}.svg", groups, metric.x_label, metric.y_label)
                )
        return StatsOutcome(rows=rows, csv_path=csv_path, figures=figures)

    def _test_file(
        self,
        path: Path,
        records: Sequence[RobustnessRecord],
        metric: MetricPair,
        tail: Tail,
        method: str,
        groups: Dict[str, tuple],
    ) -> dict:
        finite = [
            r for r in records
            if math.isfinite(getattr(r, metric.x)) and math.isfinite(getattr(r, metric.y))
        ]
        if len(finite) < len(records):
            logger.warning(f"{path}: dropped {len(records) - len(finite)} non-finite rows")
        x = [getattr(r, metric.x) for r in finite]
        y = [getattr(r, metric.y) for r in finite]
        write_scatter_data(
            self.config.output_dir / f"{path.stem}-{metric.name}-scatter.csv",
            x, y, [r.controller_id for r in finite],
        )
        if finite:
            groups[path.stem] = (x, y)

        capped = sum(r.terminated == Termination.MAX_ITERATIONS.value for r in finite)
        at_floor = sum(r.step_at_floor for r in finite)
        if capped or at_floor:
            logger.warning(
                f"{path}: {capped} of {len(finite)} rows hit max-iterations "
                f"(delta_bar is a lower bound), {at_floor} used the floor step"
            )

        first = finite[0] if finite else None
        context = {
            "source": path.name,
            "problem": first.problem if first else None,
            "t_f": first.t_f if first else None,
            "kappa": first.kappa if first else None,
            "x": metric.x,
            "y": metric.y,
            "capped": capped,
            "at_floor": at_floor,
        }
        try:
            result = TESTS[method](x, y, tail)
        except DegenerateSampleError as e:
            logger.error(f"{path}: {e}")
            return correlation_row(None, error=str(e), **context)
        logger.info(
            f"{path.name}: {method} {metric.x} vs {metric.y}: n={result.n}, "
            f"coef={result.coefficient:.4f}, stat={result.statistic:.4f}, p={result.p_value:.4g}"
        )
        return correlation_row(result, **context)

    def close(self) -> None:
        """리소스 정리"""
        if self.tracing_manager.enabled:
            self.tracing_manager.close()


def create_study_workflow(config: RunConfig, study: Optional[StudyConfig] = None) -> StudyWorkflow:
    """StudyWorkflow 인스턴스를 생성합니다"""
    return StudyWorkflow(config, study)
