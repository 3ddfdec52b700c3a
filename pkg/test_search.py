"""최소 성능 위반 섭동 탐색 테스트"""

import logging

import numpy as np
import pytest

from gate_robustness.config import SearchConfig
from gate_robustness.dynamics import fidelity, perturbed_error, propagate
from gate_robustness.errors import ArgumentError
from gate_robustness.linalg import SIGMA_X
from gate_robustness.models import (
    Controller,
    DirectionSequence,
    Termination,
    UncertaintyStructure,
)
from gate_robustness.search import (
    ERROR_FLOOR,
    choose_step_size,
    find_delta_bar,
    search_with_config,
    step_ladder,
)
from gate_robustness.sensitivity import sensitivity_report

EPSILON = 0.1
STEP = 0.01


@pytest.fixture
def rotation_ctrl():
    return Controller(np.array([[0.5]]), 1.0)


def _crossing():
    # ε̃(δ) = 1 - cos(0.25 + 0.5 δ/√2)
    return (np.arccos(1 - EPSILON) - 0.25) / (0.5 / np.sqrt(2))


def test_delta_bar_is_within_one_step_of_analytic_crossing(
    rotation_spec, rotation_structure, rotation_ctrl
):
    result = find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, EPSILON, STEP)
    assert result.terminated is Termination.CROSSED
    assert result.delta_bar <= _crossing() < result.delta_bar + STEP
    assert result.delta_bar == pytest.approx(result.n_bar * STEP)


def test_delta_bar_agrees_with_dense_scan(rotation_spec, rotation_structure, rotation_ctrl):
    result = find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, EPSILON, STEP)
    dirs = DirectionSequence.constant(1, np.array([0.0, 1.0]))
    grid = np.arange(0.0, 1.0, STEP / 10)
    errors = [perturbed_error(rotation_spec, rotation_ctrl, rotation_structure, d, dirs) for d in grid]
    first_violation = grid[np.argmax(np.array(errors) >= EPSILON)]
    assert abs(result.delta_bar - first_violation) <= STEP


def test_trace_records_path_until_crossing(rotation_spec, rotation_structure, rotation_ctrl):
    result = find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, EPSILON, STEP)
    assert len(result.trace) == result.n_bar + 1
    deltas = [d for d, _ in result.trace]
    np.testing.assert_allclose(deltas, STEP * np.arange(1, result.n_bar + 2))
    assert all(err < EPSILON for _, err in result.trace[:-1])
    assert result.trace[-1][1] >= EPSILON


def test_nominal_violation_returns_zero(rotation_spec, rotation_structure, rotation_ctrl):
    result = find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, 0.01, STEP)
    assert result.delta_bar == 0.0
    assert result.n_bar == 0
    assert result.trace == [(0.0, pytest.approx(1 - np.cos(0.25)))]


def test_max_iterations_reports_lower_bound(rotation_spec, rotation_structure, rotation_ctrl):
    result = find_delta_bar(
        rotation_spec, rotation_ctrl, rotation_structure, EPSILON, STEP, max_iter=3
    )
    assert result.terminated is Termination.MAX_ITERATIONS
    assert result.delta_bar == pytest.approx(0.03)
    assert len(result.trace) == 3


def test_invalid_step_is_rejected(rotation_spec, rotation_structure, rotation_ctrl):
    with pytest.raises(ArgumentError):
        find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, EPSILON, 0.0)


def test_step_ladder():
    ladder = step_ladder(1e-6)
    assert ladder[0] == pytest.approx(0.1)
    assert ladder[-1] == pytest.approx(1e-6)
    assert len(ladder) == 21
    np.testing.assert_allclose(ladder[1:] / ladder[:-1], 10 ** -0.25)


def test_step_size_keeps_relative_change_below_tolerance(
    rotation_spec, rotation_structure, rotation_ctrl
):
    choice = choose_step_size(rotation_spec, rotation_ctrl, rotation_structure)
    assert choice.step == pytest.approx(10 ** -1.5)
    assert choice.relative_change < 0.1
    assert not choice.at_floor


def test_step_size_falls_back_to_floor(rotation_spec, rotation_structure, rotation_ctrl, caplog):
    with caplog.at_level(logging.WARNING, logger="gate_robustness.search"):
        choice = choose_step_size(
            rotation_spec, rotation_ctrl, rotation_structure, tolerance=1e-9, floor=1e-2
        )
    assert choice.step == 1e-2
    assert choice.at_floor
    assert "floor" in caplog.text

    config = SearchConfig(epsilon=EPSILON, step_tolerance=1e-9, step_floor=1e-2)
    result = search_with_config(rotation_spec, rotation_ctrl, rotation_structure, config)
    assert result.step == 1e-2
    assert result.step_at_floor


def test_accepted_small_step_is_not_flagged(rotation_spec, rotation_structure, rotation_ctrl):
    result = find_delta_bar(
        rotation_spec, rotation_ctrl, rotation_structure, EPSILON, 1e-6, max_iter=3
    )
    assert not result.step_at_floor


def test_search_with_config_uses_fixed_step(rotation_spec, rotation_structure, rotation_ctrl):
    config = SearchConfig(epsilon=EPSILON, step=STEP)
    result = search_with_config(rotation_spec, rotation_ctrl, rotation_structure, config)
    assert result.step == STEP
    assert result.delta_bar <= _crossing()


@pytest.fixture
def drift_x_structure():
    structures = np.stack([SIGMA_X / np.sqrt(2.0), np.zeros((2, 2))])
    return UncertaintyStructure(structures, (True, False))


def test_step_size_for_converged_controller_avoids_floor(rotation_spec, drift_x_structure):
    # ε̃(𝚍) ≈ 𝚍²/4 around a controller already at the target
    ctrl = Controller(np.array([[1e-8]]), 1.0)
    assert fidelity(propagate(rotation_spec, ctrl), rotation_spec.target).error < 1e-15
    assert ERROR_FLOOR == 1e-12
    assert choose_step_size(rotation_spec, ctrl, drift_x_structure).at_floor

    choice = choose_step_size(rotation_spec, ctrl, drift_x_structure, error_floor=1e-4)
    assert choice.step == pytest.approx(10 ** -2.25)
    assert not choice.at_floor
    assert SearchConfig().error_floor == 1e-4

    config = SearchConfig(epsilon=EPSILON)
    result = search_with_config(rotation_spec, ctrl, drift_x_structure, config)
    assert result.terminated is Termination.CROSSED
    assert not result.step_at_floor
    crossing = np.arccos(1 - EPSILON) * np.sqrt(2.0)
    assert result.delta_bar <= crossing < result.delta_bar + result.step


def test_step_size_matches_linear_response_estimate(
    rotation_spec, rotation_structure, rotation_ctrl
):
    report = sensitivity_report(rotation_spec, rotation_ctrl, rotation_structure)
    estimate = report.fidelity.error / (10 * report.b_vu)
    choice = choose_step_size(rotation_spec, rotation_ctrl, rotation_structure)
    assert 10 ** -0.5 * estimate <= choice.step <= 10 ** 0.25 * estimate


def test_halving_step_keeps_delta_bar_within_one_step(
    rotation_spec, rotation_structure, rotation_ctrl
):
    coarse = find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, EPSILON, STEP)
    fine = find_delta_bar(rotation_spec, rotation_ctrl, rotation_structure, EPSILON, STEP / 2)
    assert fine.delta_bar <= coarse.delta_bar + STEP
    assert abs(fine.delta_bar - coarse.delta_bar) <= STEP


def test_larger_bound_means_faster_first_step_growth(rotation_spec, rotation_structure):
    d = 1e-3
    rows = []
    for field in (0.3, 0.6, 1.2, 2.0):
        ctrl = Controller(np.array([[field]]), 1.0)
        report = sensitivity_report(rotation_spec, ctrl, rotation_structure)
        growth = perturbed_error(
            rotation_spec, ctrl, rotation_structure, d, report.worst_dirs
        ) - report.fidelity.error
        rows.append((report.b_vu, growth))
    rows.sort()
    growths = [g for _, g in rows]
    assert growths == sorted(growths)
    assert all(g > 0 for g in growths)
