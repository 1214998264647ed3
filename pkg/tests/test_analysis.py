import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import loctime as lt
from loctime.estimators import Curve, EstimatorKind


def curve(values, t_values=None):
    values = np.asarray(values, dtype=float)
    if t_values is None:
        t_values = np.arange(values.size, dtype=float)
    return Curve(t_values, values, 1.0, EstimatorKind.J)


def test_sup_error_examples():
    a = curve([0.0, 1.0, 2.0])
    assert lt.sup_error(a, a) == 0.0
    b = curve([0.0, 0.0, 0.0])
    assert lt.sup_error(a, b) == 2.0
    assert lt.sup_error(a, b) == lt.sup_error(b, a)


def test_sup_error_grid_mismatch():
    a = curve([0.0, 1.0])
    b = curve([0.0, 1.0], t_values=np.array([0.0, 2.0]))
    with pytest.raises(ValueError):
        lt.sup_error(a, b)


def test_l2_ensemble_error_examples():
    report = lt.l2_ensemble_error([2.5, 2.5, 2.5])
    assert report.l2_estimate == pytest.approx(2.5)
    assert report.std_error == 0.0
    report = lt.l2_ensemble_error([3.0, 4.0])
    assert report.l2_estimate == pytest.approx(math.sqrt(12.5))
    report = lt.l2_ensemble_error([0.0, 0.0, 0.0])
    assert report.l2_estimate == 0.0
    assert report.n_paths == 3
    with pytest.raises(ValueError):
        lt.l2_ensemble_error([])


def test_l2_report_square_consistency():
    errors = np.abs(np.random.default_rng(0).standard_normal(50))
    report = lt.l2_ensemble_error(errors)
    assert report.l2_estimate**2 == pytest.approx(
        np.mean(errors**2), rel=1e-12
    )


@given(
    errors=st.lists(st.floats(0.01, 10.0), min_size=2, max_size=30),
    seed=st.integers(0, 1000),
)
@settings(max_examples=50, deadline=None)
def test_l2_is_permutation_invariant(errors, seed):
    shuffled = list(errors)
    np.random.default_rng(seed).shuffle(shuffled)
    a = lt.l2_ensemble_error(errors)
    b = lt.l2_ensemble_error(shuffled)
    assert a.l2_estimate == pytest.approx(b.l2_estimate, rel=1e-12)


def test_fit_rate_exact_power_laws():
    eps = np.array([2.0**-k for k in range(4, 8)])
    fit = lt.fit_rate(eps, 2.0 * eps**0.25)
    assert fit.slope == pytest.approx(0.25, abs=1e-10)
    assert fit.intercept == pytest.approx(math.log(2.0), abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-10)
    fit = lt.fit_rate(eps, np.full(4, 3.7))
    assert fit.slope == pytest.approx(0.0, abs=1e-10)
    fit = lt.fit_rate(eps, eps**0.5)
    assert fit.slope == pytest.approx(0.5, abs=1e-10)


def test_fit_rate_rejects_bad_input():
    eps = np.array([2.0**-k for k in range(4, 8)])
    with pytest.raises(ValueError):
        lt.fit_rate(eps[:3], np.ones(3))
    with pytest.raises(ValueError):
        lt.fit_rate(eps, np.array([1.0, 1.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        lt.fit_rate(eps[::-1], np.ones(4))


def test_as_subsequence_examples():
    eps = np.array([4.0**-n for n in (2, 3, 4, 5)])
    decreasing = np.tile(np.array([[4.0], [3.0], [2.0], [1.0]]), (1, 5))
    assert lt.as_subsequence_check(decreasing, eps) == 1.0
    constant = np.ones((4, 5))
    assert lt.as_subsequence_check(constant, eps) == 1.0
    # the first entry is ignored; a bump there does not count
    bumped = decreasing.copy()
    bumped[0, :] = 0.5
    assert lt.as_subsequence_check(bumped, eps) == 1.0
    # a bump later does
    broken = decreasing.copy()
    broken[2, 0] = 10.0
    assert lt.as_subsequence_check(broken, eps) == pytest.approx(0.8)


def test_as_subsequence_validates():
    eps = np.array([4.0**-n for n in (2, 3, 4, 5)])
    with pytest.raises(ValueError):
        lt.as_subsequence_check(np.ones((3, 5)), eps)
    with pytest.raises(ValueError):
        lt.as_subsequence_check(np.ones((4, 5)), np.array([0.5, 0.25, 0.125, 0.0625]))
