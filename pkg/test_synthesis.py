"""제어기 합성 테스트"""

import logging

import numpy as np
import pytest
from scipy.linalg import expm

from gate_robustness.config import SynthesisConfig
from gate_robustness.dynamics import fidelity, propagate
from gate_robustness.errors import ArgumentError, PhaseUndefinedError
from gate_robustness.linalg import SIGMA_X
from gate_robustness.models import Controller
from gate_robustness.problems import ProblemSpec
from gate_robustness.synthesis import batch_synthesize, gradient_error, optimize


def _error(spec, fields, t_f):
    return fidelity(propagate(spec, Controller(fields, t_f)), spec.target).error


@pytest.fixture
def quarter_turn_spec():
    return ProblemSpec(
        1, np.zeros((2, 2), complex), (0.5 * SIGMA_X,), expm(-0.25j * np.pi * SIGMA_X)
    )


def test_gradient_matches_central_differences(rng, problem_one, random_controller):
    ctrl = random_controller(rng, problem_one.n_controls, 10, 2.0)
    grad = gradient_error(problem_one, ctrl)
    assert grad.shape == (problem_one.n_controls, 10)
    h = 1e-6
    for _ in range(10):
        m, k = int(rng.integers(problem_one.n_controls)), int(rng.integers(10))
        plus, minus = ctrl.fields.copy(), ctrl.fields.copy()
        plus[m, k] += h
        minus[m, k] -= h
        fd = (_error(problem_one, plus, 2.0) - _error(problem_one, minus, 2.0)) / (2 * h)
        assert abs(grad[m, k] - fd) <= 1e-5 * abs(fd) + 1e-9


def test_gradient_is_deterministic(problem_one):
    ctrl = Controller(np.zeros((problem_one.n_controls, 8)), 3.0)
    first = gradient_error(problem_one, ctrl)
    assert np.all(np.isfinite(first))
    np.testing.assert_array_equal(first, gradient_error(problem_one, ctrl))


def test_gradient_requires_defined_phase():
    spec = ProblemSpec(1, np.zeros((2, 2), complex), (0.5 * SIGMA_X,), SIGMA_X)
    with pytest.raises(PhaseUndefinedError):
        gradient_error(spec, Controller(np.zeros((1, 3)), 1.0))


def test_optimize_finds_quarter_turn(quarter_turn_spec):
    result = optimize(quarter_turn_spec, 1.0, 4, SynthesisConfig(seed=3))
    assert result.error < 1e-10
    theta = result.controller.fields.sum() * result.controller.delta_t
    assert abs(np.cos((theta - np.pi / 2) / 2)) > 1 - 1e-9
    assert np.max(np.abs(gradient_error(quarter_turn_spec, result.controller))) < 1e-5


def test_optimize_trust_region(quarter_turn_spec):
    config = SynthesisConfig(seed=3, method="trust-region", max_iters=500)
    result = optimize(quarter_turn_spec, 1.0, 4, config)
    assert result.method == "trust-region"
    assert result.error < 1e-6


def test_zero_start_on_trivial_problem_converges_immediately():
    spec = ProblemSpec(1, np.zeros((2, 2), complex), (0.5 * SIGMA_X,), np.eye(2, dtype=complex))
    result = optimize(spec, 1.0, 3, SynthesisConfig(init="zeros"))
    assert result.error == pytest.approx(0.0, abs=1e-15)
    assert result.converged
    assert result.iterations == 0


def test_recorded_error_matches_reevaluation(qubit_spec):
    result = optimize(qubit_spec, 2.0, 6, SynthesisConfig(seed=1, max_iters=50))
    reevaluated = fidelity(propagate(qubit_spec, result.controller), qubit_spec.target).error
    assert result.error == pytest.approx(reevaluated, abs=1e-12)


def test_batch_keeps_all_with_unit_filter(qubit_spec):
    config = SynthesisConfig(seed=5, max_iters=30, fidelity_filter=1.0)
    results = batch_synthesize(qubit_spec, 2.0, 4, 4, config)
    assert [r.restart for r in results] == [0, 1, 2, 3]
    assert all(r.seed == 5 and r.init == "uniform" for r in results)


def test_batch_is_deterministic_across_worker_counts(qubit_spec):
    first = batch_synthesize(
        qubit_spec, 2.0, 4, 3, SynthesisConfig(seed=9, max_iters=40, fidelity_filter=1.0, workers=1)
    )
    second = batch_synthesize(
        qubit_spec, 2.0, 4, 3, SynthesisConfig(seed=9, max_iters=40, fidelity_filter=1.0, workers=3)
    )
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.controller.fields, b.controller.fields)


def test_zero_start_option_changes_first_restart(qubit_spec):
    config = SynthesisConfig(seed=2, max_iters=5, fidelity_filter=1.0, include_zero_start=True)
    results = batch_synthesize(qubit_spec, 2.0, 4, 2, config)
    assert [r.init for r in results] == ["zeros", "uniform"]


def test_empty_batch_warns(qubit_spec, caplog):
    with caplog.at_level(logging.WARNING, logger="gate_robustness.synthesis"):
        assert batch_synthesize(qubit_spec, 2.0, 4, 0) == []
    assert "No controller" in caplog.text


def test_config_validation():
    with pytest.raises(ArgumentError):
        SynthesisConfig(fidelity_filter=0.0)
    with pytest.raises(ArgumentError):
        SynthesisConfig(workers=0)
    assert SynthesisConfig(init="standard-normal").init.value == "standard-normal"
