"""상관 가설 검정 테스트"""

import numpy as np
import pytest
from scipy import stats as scistats

from gate_robustness.errors import ArgumentError, DegenerateSampleError, InsufficientSampleError
from gate_robustness.models import Tail
from gate_robustness.stats import kendall_test, pearson_statistic, pearson_test


@pytest.mark.parametrize(
    "r, statistic, p_value",
    [(-0.210, -2.119, 0.018), (-0.327, -3.405, None)],
)
def test_reported_pearson_rows_are_reproduced(r, statistic, p_value):
    stat, p = pearson_statistic(r, 99, Tail.NEGATIVE)
    assert stat == pytest.approx(statistic, abs=0.01)
    if p_value is not None:
        assert p == pytest.approx(p_value, abs=0.001)


def test_perfect_linear_relation():
    x = np.arange(10.0)
    result = pearson_test(x, 2 * x + 3, Tail.POSITIVE)
    assert result.coefficient == pytest.approx(1.0)
    assert result.p_value == pytest.approx(0.0, abs=1e-12)
    assert result.significant


def test_pearson_is_invariant_under_positive_affine_maps(rng):
    x = rng.standard_normal(30)
    y = x + rng.standard_normal(30)
    a = pearson_test(x, y, "positive")
    b = pearson_test(3 * x - 1, 0.5 * y + 7, "positive")
    assert a.coefficient == pytest.approx(b.coefficient, abs=1e-12)


def test_pearson_negation_mirrors_p_value(rng):
    x = rng.standard_normal(40)
    y = 0.3 * x + rng.standard_normal(40)
    a = pearson_test(x, y, "positive")
    b = pearson_test(x, -y, "positive")
    assert b.coefficient == pytest.approx(-a.coefficient, abs=1e-12)
    assert b.p_value == pytest.approx(1 - a.p_value, abs=1e-9)


def test_pearson_rejects_bad_samples():
    with pytest.raises(InsufficientSampleError):
        pearson_test([1.0, 2.0], [1.0, 3.0])
    with pytest.raises(DegenerateSampleError):
        pearson_test([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ArgumentError):
        pearson_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], tail="both")
    assert issubclass(InsufficientSampleError, DegenerateSampleError)


def test_kendall_small_example():
    result = kendall_test([1, 2, 3, 4], [1, 3, 2, 4], Tail.POSITIVE)
    assert result.coefficient == pytest.approx(2 / 3)
    assert result.statistic == pytest.approx(3 * (2 / 3) * np.sqrt(12) / np.sqrt(26))
    assert result.method == "kendall"


def test_kendall_strictly_decreasing():
    x = np.arange(50.0)
    result = kendall_test(x, -x, Tail.NEGATIVE)
    assert result.coefficient == pytest.approx(-1.0)
    assert result.p_value < 1e-10


def test_kendall_is_invariant_under_monotone_maps(rng):
    x = rng.standard_normal(25)
    y = x + rng.standard_normal(25)
    a = kendall_test(x, y)
    b = kendall_test(np.exp(x), y ** 3)
    assert a.coefficient == pytest.approx(b.coefficient, abs=1e-12)
    assert a.statistic == pytest.approx(b.statistic, abs=1e-12)


def test_kendall_tie_correction_matches_two_sided_reference(rng):
    x = rng.integers(0, 5, size=40).astype(float)
    y = (x + rng.integers(0, 3, size=40)).astype(float)
    result = kendall_test(x, y, Tail.POSITIVE)
    reference = scistats.kendalltau(x, y, method="asymptotic")
    assert result.coefficient == pytest.approx(reference.statistic, abs=1e-12)
    two_sided = 2 * min(result.p_value, 1 - result.p_value)
    assert two_sided == pytest.approx(reference.pvalue, rel=1e-9)


def test_kendall_independent_sample_is_weak():
    rng = np.random.default_rng(20240607)
    x = rng.permutation(100).astype(float)
    y = rng.standard_normal(100)
    result = kendall_test(x, y, Tail.NEGATIVE)
    assert abs(result.coefficient) < 0.2
    assert 0.0 <= result.p_value <= 1.0


def test_kendall_rejects_all_tied_sample():
    with pytest.raises(DegenerateSampleError):
        kendall_test([2.0, 2.0, 2.0, 2.0], [1.0, 2.0, 3.0, 4.0])
