"""SVG 그림 출력

로그-로그 산점도(여러 기록 파일을 색으로 구분)와 제어기 번호에 대한 지표
프로파일(세로축 로그)을 그립니다.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import StorageError  # noqa: E402
from .storage import ensure_directory  # noqa: E402

logger = logging.getLogger(__name__)

# log(0) 방지용 하한
LOG_FLOOR = 1e-16


def floor_for_log(values: Sequence[float]) -> np.ndarray:
    return np.maximum(np.asarray(values, dtype=float), LOG_FLOOR)


def _save(fig, path: Path) -> Path:
    ensure_directory(path.parent)
    try:
        fig.savefig(path, format="svg")
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e
    finally:
        plt.close(fig)
    logger.debug(f"Wrote figure {path}")
    return path


def scatter_svg(
    path: Path,
    groups: Dict[str, tuple],
    x_label: str,
    y_label: str,
    title: Optional[str] = None,
) -> Path:
    """로그-로그 산점도

    Args:
        path: 출력 SVG 경로
        groups: 범례 이름 → (x 값들, y 값들)
        x_label: 가로축 이름
        y_label: 세로축 이름
    """
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for name, (x, y) in groups.items():
        ax.scatter(floor_for_log(x), floor_for_log(y), s=12, alpha=0.8, label=name)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if title:
        ax.set_title(title)
    if len(groups) > 1:
        ax.legend(fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def profile_svg(path: Path, series: Dict[str, Sequence[float]], title: Optional[str] = None) -> Path:
    """제어기 번호에 대한 지표 프로파일 (세로축 로그)"""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, values in series.items():
        y = floor_for_log(values)
        ax.plot(np.arange(1, y.size + 1), y, marker="o", markersize=3, linewidth=1, label=name)
    ax.set_yscale("log")
    ax.set_xlabel("controller index")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
