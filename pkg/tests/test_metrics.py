import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpl.core import Atom, FullCov, PiecewiseLinearFn, TopAtom, linear_atom
from fpl.metrics import (Metric, MetricError, SingularCovariance, closed_form_distance_curve, distances,
                         point_distance, space_lipschitz)

from conftest import drift_atom, line_traj


@pytest.mark.parametrize("t,expected", [(0.0, 2.0), (1.5, 4.0), (3.0, 8.0)])
def test_mahalanobis_against_drift_atom(t, expected):
    assert point_distance([t, -1], drift_atom(), t, Metric.MAHALANOBIS) == pytest.approx(expected, abs=1e-12)


def test_mahalanobis_inf_uses_the_largest_standardized_deviation():
    # |dy| / std_y = 1 / 0.5 at t = 0, x on the mean
    assert point_distance([0, -1], drift_atom(), 0.0, Metric.MAHALANOBIS_INF) == pytest.approx(2.0)
    assert point_distance([0.5, 0], drift_atom(), 0.0, Metric.MAHALANOBIS_INF) == pytest.approx(2.0)


def test_quantile_metrics():
    a = linear_atom("a", [0.0], [0.0], [1.0], 1.0)
    u = lambda x: point_distance([x], a, 0.0, Metric.QUANTILE_UNIFORM)  # noqa: E731
    tri = lambda x: point_distance([x], a, 0.0, Metric.QUANTILE_TRIANGULAR)  # noqa: E731
    assert u(0) == 0 and u(10) == 1
    assert u(math.sqrt(3) / 2) == pytest.approx(0.5)
    assert tri(0) == 0 and tri(10) == 1
    h = math.sqrt(6)
    assert tri(h / 2) == pytest.approx(0.75)


def test_euclidean_and_top():
    a = drift_atom()
    assert point_distance([3, 4], a, 0.0, Metric.EUCLIDEAN) == pytest.approx(5.0)
    assert point_distance([100, 100], TopAtom(3, 2), 1.0, Metric.MAHALANOBIS) == 0.0


def _full(entries, horizon=1.0):
    c = lambda v: PiecewiseLinearFn.constant(v, 0, horizon)  # noqa: E731
    mean = (c(0.0), c(0.0))
    return Atom("f", horizon, mean, FullCov(tuple(tuple(c(v) for v in row) for row in entries)))


def test_full_covariance_mahalanobis():
    a = _full([[4.0, 0.0], [0.0, 1.0]])
    assert point_distance([2, 1], a, 0.5, Metric.MAHALANOBIS) == pytest.approx(math.sqrt(2))
    b = _full([[2.0, 1.0], [1.0, 2.0]])
    x = np.array([1.0, -1.0])
    expected = math.sqrt(x @ np.linalg.solve(np.array([[2, 1], [1, 2]]), x))
    assert point_distance(x, b, 0.0, Metric.MAHALANOBIS) == pytest.approx(expected)


def test_ill_conditioned_covariance_is_rejected():
    a = _full([[1.0, 1.0 - 1e-14], [1.0 - 1e-14, 1.0]])
    with pytest.raises(SingularCovariance):
        point_distance([1, 0], a, 0.0, Metric.MAHALANOBIS)


def test_quantile_needs_diagonal_covariance():
    with pytest.raises(MetricError):
        point_distance([1, 0], _full([[2.0, 1.0], [1.0, 2.0]]), 0.0, Metric.QUANTILE_UNIFORM)


def test_time_outside_horizon():
    with pytest.raises(MetricError):
        point_distance([0, 0], drift_atom(), 3.5, Metric.MAHALANOBIS)


def test_metric_parse():
    assert Metric.parse(" Mahalanobis-Inf ") is Metric.MAHALANOBIS_INF
    with pytest.raises(MetricError):
        Metric.parse("manhattan")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(Metric)), st.floats(0, 3),
       st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_space_lipschitz_bounds_differences(metric, t, xs):
    a = drift_atom()
    x, y = np.array(xs[:2]), np.array(xs[2:])
    k = float(space_lipschitz(a, np.array([t]), metric)[0])
    dx = point_distance(x, a, t, metric) - point_distance(y, a, t, metric)
    norm = np.linalg.norm(x - y, ord=np.inf if metric is not Metric.EUCLIDEAN and metric is not Metric.MAHALANOBIS else 2)
    assert abs(dx) <= k * norm * (1 + 1e-9) + 1e-12


def test_vectorized_distances_match_scalar_calls():
    a = drift_atom()
    t = np.linspace(0, 3, 7)
    pts = np.stack([t, -np.ones_like(t)], axis=1)
    d = distances(pts, a, t, Metric.MAHALANOBIS)
    np.testing.assert_allclose(d, [(12 + 4 * s) / (6 - s) for s in t])


def test_closed_form_segments_reproduce_the_rational_curve():
    curve = closed_form_distance_curve(line_traj(3.0), drift_atom(), Metric.MAHALANOBIS, step=0.25)
    (seg,) = curve.segments
    assert seg.rational
    t = np.linspace(0, 3, 13)
    np.testing.assert_allclose(seg.evaluate(t), (12 + 4 * t) / (6 - t), rtol=1e-12)
    assert curve(3.0) == pytest.approx(8.0)
    assert curve.max_slope() > 0
