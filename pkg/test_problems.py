"""벤치마크 문제 목록 테스트"""

import itertools

import numpy as np
import pytest

from gate_robustness.errors import ArgumentError
from gate_robustness.linalg import I2, SIGMA_Z, is_hermitian, is_unitary
from gate_robustness.problems import (
    CouplingKind,
    ControlTopology,
    build_controls,
    build_drift,
    build_problem,
    cnot_matrix,
    get_template,
    problem_registry,
    qft_matrix,
    validate_timing,
)

TABLE = {
    1: ("ising-zz", 2, "individual-qubit", "cnot", (2, 3, 4), (40, 64, 128)),
    2: ("ising-zz", 3, "individual-qubit", "qft", (7, 8), (40, 64)),
    3: ("ising-zz", 4, "individual-qubit", "qft", (12, 15, 20), (40, 64)),
    4: ("ising-zz", 5, "individual-qubit", "qft", (12, 15, 25), (64, 128)),
    5: ("heisenberg-xxx", 3, "individual-qubit", "qft", (7, 8), (40, 64)),
    6: ("heisenberg-xxx", 3, "individual-qubit", "random-unitary", (7, 8), (40, 64)),
    7: ("ising-zz-stark", 5, "global-simultaneous", "qft", (125, 150), (1000,)),
    8: ("heisenberg-xxx", 3, "first-qubit-only", "qft", (10, 15), (32, 64)),
    9: ("heisenberg-xxx", 3, "first-qubit-only", "random-unitary", (10, 15), (32, 64)),
}


def test_registry_matches_problem_table():
    registry = problem_registry()
    assert sorted(registry) == list(range(1, 10))
    for label, (coupling, q, topology, target, tfs, kappas) in TABLE.items():
        t = registry[label]
        assert t.coupling.value == coupling
        assert t.n_qubits == q
        assert t.topology.value == topology
        assert t.target.kind.value == target
        assert t.tf_options == tfs
        assert t.kappa_options == kappas


def test_qft_of_dimension_two_is_hadamard():
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    np.testing.assert_allclose(qft_matrix(2), hadamard, atol=1e-15)


def test_qft_eight_is_unitary():
    assert is_unitary(qft_matrix(8), tol=1e-12)


def test_cnot_flips_target_when_first_qubit_set():
    u = cnot_matrix()
    basis = np.eye(4)
    np.testing.assert_array_equal(u @ basis[2], basis[3])
    np.testing.assert_array_equal(u @ basis[0], basis[0])


def test_stark_drift_has_exact_onsite_coefficients():
    q = 5
    h = build_drift(q, CouplingKind.ISING_ZZ_STARK)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    expected = []
    for bits in itertools.product((0, 1), repeat=q):
        z = [1 - 2 * b for b in bits]
        zz = 0.5 * sum(z[i] * z[i + 1] for i in range(q - 1))
        onsite = 0.5 * sum((ell + 2) * z[ell - 1] for ell in range(1, q + 1))
        expected.append(zz - onsite)
    np.testing.assert_allclose(np.diag(h).real, expected, rtol=0, atol=1e-12)


def test_heisenberg_drift_is_hermitian_and_real_symmetric():
    h = build_drift(3, CouplingKind.HEISENBERG_XXX)
    assert is_hermitian(h)
    np.testing.assert_allclose(h.imag, 0.0, atol=1e-15)


def test_drift_requires_two_qubits():
    with pytest.raises(ArgumentError):
        build_drift(1, CouplingKind.ISING_ZZ)


def test_control_counts_and_global_norm():
    assert len(build_controls(3, ControlTopology.INDIVIDUAL_QUBIT)) == 6
    assert len(build_controls(3, ControlTopology.FIRST_QUBIT_ONLY)) == 2
    global_x, global_y = build_controls(5, ControlTopology.GLOBAL_SIMULTANEOUS)
    assert np.linalg.norm(global_x) == pytest.approx(0.5 * np.sqrt(160))
    assert np.linalg.norm(global_y) == pytest.approx(0.5 * np.sqrt(160))


def test_built_problems_are_consistent():
    for label in (1, 2, 5, 8):
        spec = build_problem(label)
        assert spec.label == label
        assert spec.target.shape == (spec.dim, spec.dim)
        assert spec.n_controls == problem_registry()[label].topology.n_controls(spec.n_qubits)


def test_random_unitary_targets_are_shared():
    np.testing.assert_array_equal(build_problem(6).target, build_problem(9).target)


def test_validate_timing():
    validate_timing(1, 3, 64)
    with pytest.raises(ArgumentError):
        validate_timing(1, 5, 64)
    validate_timing(1, 5, 10, override=True)
    with pytest.raises(ArgumentError):
        validate_timing(10, 3, 64)


def test_registry_drifts_are_traceless():
    for label, t in problem_registry().items():
        h = build_drift(t.n_qubits, t.coupling)
        assert is_hermitian(h)
        assert abs(np.trace(h)) < 1e-12, label


def test_two_qubit_drifts():
    np.testing.assert_allclose(
        build_drift(2, CouplingKind.ISING_ZZ), np.diag([0.5, -0.5, -0.5, 0.5]), atol=1e-15
    )
    onsite = 3 * np.kron(SIGMA_Z, I2) + 4 * np.kron(I2, SIGMA_Z)
    stark = 0.5 * np.kron(SIGMA_Z, SIGMA_Z) - 0.5 * onsite
    np.testing.assert_allclose(build_drift(2, CouplingKind.ISING_ZZ_STARK), stark, atol=1e-15)


def test_heisenberg_pair_commutes_with_swap():
    h = build_drift(2, CouplingKind.HEISENBERG_XXX)
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.max(np.abs(h @ swap - swap @ h)) < 1e-12


def test_qft_four_second_row():
    np.testing.assert_allclose(qft_matrix(4)[1], 0.5 * np.array([1, 1j, -1, -1j]), atol=1e-15)


def test_template_builds_matching_problem():
    template = get_template(5)
    spec = template.build()
    assert spec.label == 5
    assert spec.n_qubits == template.n_qubits
    np.testing.assert_array_equal(spec.drift, build_problem(5).drift)
    np.testing.assert_array_equal(spec.target, build_problem(5).target)
