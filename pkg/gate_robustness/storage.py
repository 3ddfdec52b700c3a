"""결과 파일 입출력

제어기는 JSON 레코드(제어기당 파일 하나), 표 형식 결과는 RFC 4180 CSV로
저장합니다. 모든 파일은 UTF-8 입니다.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from .errors import StorageError
from .linalg import frobenius_normalize
from .models import (
    SCHEMA_VERSION,
    ControllerRecord,
    CorrelationResult,
    DeltaSearchResult,
    RobustnessRecord,
    UncertaintyStructure,
)
from .problems import ProblemSpec

logger = logging.getLogger(__name__)

CONTROLLER_SUFFIX = ".json"
INDEX_FIELDS = [
    "controller_id", "seed", "restart", "init", "method", "error", "iterations", "converged",
]
ROBUSTNESS_FIELDS = ["schema_version", *RobustnessRecord.model_fields.keys()]
CORRELATION_FIELDS = [
    "source", "problem", "t_f", "kappa", "n", "x", "y", "method", "tail",
    "coefficient", "statistic", "p_value", "significant", "capped", "at_floor", "error",
]


def ensure_directory(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise StorageError(f"cannot create output directory {path}: {e}") from e
    return path


def _open_for_write(path: Path) -> TextIO:
    try:
        return path.open("w", encoding="utf-8", newline="")
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e


def _open_for_read(path: Path) -> TextIO:
    try:
        return path.open("r", encoding="utf-8", newline="")
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}") from e


def save_controller(record: ControllerRecord, directory: Path) -> Path:
    """제어기 레코드를 <controller_id>.json 으로 저장"""
    ensure_directory(directory)
    path = directory / f"{record.controller_id}{CONTROLLER_SUFFIX}"
    with _open_for_write(path) as f:
        f.write(record.model_dump_json(indent=2))
        f.write("\n")
    return path


def load_controller(path: Path) -> ControllerRecord:
    """JSON 제어기 레코드 읽기

    Raises:
        StorageError: 파일이 없거나 형식이 맞지 않는 경우
    """
    with _open_for_read(Path(path)) as f:
        text = f.read()
    try:
        record = ControllerRecord.model_validate_json(text)
    except ValidationError as e:
        raise StorageError(f"{path}: malformed controller record: {e}") from e
    if record.schema_version != SCHEMA_VERSION:
        raise StorageError(
            f"{path}: schema version {record.schema_version} is not {SCHEMA_VERSION}"
        )
    return record


def controller_files(paths: Iterable[Path]) -> List[Path]:
    """경로 목록을 제어기 파일 목록으로 펼침 (디렉터리는 *.json 검색)"""
    found: List[Path] = []
    for path in map(Path, paths):
        if path.is_dir():
            found.extend(sorted(path.glob(f"*{CONTROLLER_SUFFIX}")))
        elif path.exists():
            found.append(path)
        else:
            raise StorageError(f"controller path {path} does not exist")
    return found


def _write_rows(path: Path, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    ensure_directory(path.parent)
    with _open_for_write(path) as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_index(path: Path, records: Sequence[ControllerRecord]) -> Path:
    """합성 결과 색인 CSV (id, seed, ε ...)"""
    return _write_rows(path, INDEX_FIELDS, (r.model_dump() for r in records))


def write_robustness_records(path: Path, records: Sequence[RobustnessRecord]) -> Path:
    rows = ({"schema_version": SCHEMA_VERSION, **r.model_dump()} for r in records)
    return _write_rows(path, ROBUSTNESS_FIELDS, rows)


def read_robustness_records(path: Path) -> List[RobustnessRecord]:
    """분석 CSV 읽기 (스키마 버전 확인)"""
    records = []
    with _open_for_read(Path(path)) as f:
        reader = csv.DictReader(f)
        missing = set(ROBUSTNESS_FIELDS) - set(reader.fieldnames or [])
        if missing:
            raise StorageError(f"{path}: missing columns {sorted(missing)}")
        for line, row in enumerate(reader, start=2):
            version = row.pop("schema_version")
            if version != str(SCHEMA_VERSION):
                raise StorageError(f"{path}:{line}: schema version {version} is not {SCHEMA_VERSION}")
            try:
                records.append(RobustnessRecord.model_validate(row))
            except ValidationError as e:
                raise StorageError(f"{path}:{line}: malformed row: {e}") from e
    return records


def write_search_trace(path: Path, controller_id: str, result: DeltaSearchResult) -> Path:
    """탐색 경로 (n, δ_n, ε̃(δ_n)) CSV"""
    rows = (
        {
            "controller_id": controller_id,
            "n": int(round(delta / result.step)),
            "delta": delta,
            "error": err,
        }
        for delta, err in result.trace
    )
    return _write_rows(path, ["controller_id", "n", "delta", "error"], rows)


def correlation_row(
    result: Optional[CorrelationResult],
    source: str = "",
    problem: Optional[int] = None,
    t_f: Optional[float] = None,
    kappa: Optional[int] = None,
    x: str = "",
    y: str = "",
    error: str = "",
    capped: Optional[int] = None,
    at_floor: Optional[int] = None,
) -> Dict[str, Any]:
    """검정 결과 한 행 (result가 None이면 오류 행)

    capped는 max-iterations로 끝난 행 수, at_floor는 간격이 하한인 행 수입니다.
    """
    row: Dict[str, Any] = {
        "source": source, "problem": problem, "t_f": t_f, "kappa": kappa, "x": x, "y": y,
        "capped": capped, "at_floor": at_floor, "error": error,
    }
    if result is not None:
        row.update(
            n=result.n,
            method=result.method,
            tail=result.tail.value,
            coefficient=result.coefficient,
            statistic=result.statistic,
            p_value=result.p_value,
            significant=result.significant,
        )
    return row


def write_correlation_rows(path: Path, rows: Sequence[Dict[str, Any]]) -> Path:
    return _write_rows(path, CORRELATION_FIELDS, rows)


def write_scatter_data(
    path: Path, x: Sequence[float], y: Sequence[float], labels: Sequence[str]
) -> Path:
    """산점도 데이터 (controller_id, x, y)"""
    rows = ({"controller_id": c, "x": a, "y": b} for c, a, b in zip(labels, x, y))
    return _write_rows(path, ["controller_id", "x", "y"], rows)


def _matrix(raw: Any, name: str, dim: int) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (dim, dim):
        raise StorageError(f"{name} must be {dim}x{dim}, got shape {arr.shape}")
    return arr


def load_uncertainty_structure(path: Path, spec: ProblemSpec) -> UncertaintyStructure:
    """사용자 정의 불확실성 구조 JSON 읽기

    형식: {"slots": [{"index": m, "real": [[...]], "imag": [[...]]}, ...]}
    나열되지 않은 슬롯은 비활성이며, 각 행렬은 Frobenius 노름 1로 정규화됩니다.
    """
    with _open_for_read(Path(path)) as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            raise StorageError(f"{path}: invalid JSON: {e}") from e

    n_slots = spec.n_controls + 1
    structures = np.zeros((n_slots, spec.dim, spec.dim), dtype=complex)
    mask = [False] * n_slots
    try:
        slots = payload["slots"]
        for entry in slots:
            m = int(entry["index"])
            if not 0 <= m < n_slots:
                raise StorageError(f"{path}: slot index {m} out of range 0..{n_slots - 1}")
            real = _matrix(entry["real"], f"slot {m} real part", spec.dim)
            imag = _matrix(
                entry.get("imag", np.zeros_like(real)), f"slot {m} imaginary part", spec.dim
            )
            op = real + 1j * imag
            if np.linalg.norm(op) == 0.0:
                raise StorageError(f"{path}: slot {m} is the zero matrix")
            structures[m] = frobenius_normalize(op)
            mask[m] = True
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise StorageError(f"{path}: malformed structure file: {e}") from e

    return UncertaintyStructure(structures, tuple(mask))
