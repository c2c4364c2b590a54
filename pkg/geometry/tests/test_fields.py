import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hsettings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from geometry.errors import GeometryError, MetricSingular, PointOutsideChart, StepTooLarge
from geometry.fields import (
    ChartBox,
    MetricField,
    ScalarField,
    diff1,
    diff2,
    flat_metric,
    gram_schmidt_frame,
    richardson_diff,
    round_sphere_metric,
    sample_points,
    stereographic_factor,
)


def quadratic(chart):
    """x0^2 + 3 x0 x1 - x1^2 / 2 + x2, no analytic rules."""
    return ScalarField(chart, lambda x: x[0] ** 2 + 3.0 * x[0] * x[1] - 0.5 * x[1] ** 2 + x[2])


class ChartBoxTests(SimpleTestCase):
    def test_cube_shape(self):
        chart = ChartBox.cube(3, 0.5, resolution=4)
        self.assertEqual(chart.dim, 3)
        self.assertEqual(chart.point_count, 64)
        self.assertEqual(chart.grid_points().shape, (64, 3))

    def test_invalid_bounds_rejected(self):
        with self.assertRaises(GeometryError) as ctx:
            ChartBox((0.0, 1.0), (1.0, 1.0), (3, 3))
        self.assertEqual(ctx.exception.error_code, 'invalid-chart')
        with self.assertRaises(GeometryError):
            ChartBox((0.0,), (1.0,), (1,))
        with self.assertRaises(GeometryError):
            ChartBox((), (), ())

    def test_require_interior(self):
        chart = ChartBox.cube(2, 1.0)
        chart.require_interior([0.5, 0.5], margin=0.1)
        with self.assertRaises(PointOutsideChart):
            chart.require_interior([1.0, 0.0])
        with self.assertRaises(PointOutsideChart):
            chart.require_interior([0.0, 0.0, 0.0])
        with self.assertRaises(StepTooLarge) as ctx:
            chart.require_interior([0.95, 0.0], margin=0.1)
        self.assertEqual(ctx.exception.error_code, 'step-too-large-for-margin')


class DifferenceTests(SimpleTestCase):
    def setUp(self):
        self.chart = ChartBox.cube(3, 1.0)
        self.x = np.array([0.25, -0.375, 0.5])

    def test_diff1_quadratic(self):
        F = quadratic(self.chart)
        expected = [2 * 0.25 + 3 * -0.375, 3 * 0.25 + 0.375, 1.0]
        assert_allclose(diff1(F, self.x, step=2.0**-8), expected, atol=1e-12)

    def test_diff2_exact_on_dyadic_quadratic(self):
        F = quadratic(self.chart)
        expected = np.array([[2.0, 3.0, 0.0], [3.0, -1.0, 0.0], [0.0, 0.0, 0.0]])
        assert_allclose(diff2(F, self.x, step=2.0**-6), expected, atol=1e-12)

    def test_analytic_rule_preferred(self):
        u = stereographic_factor(self.chart)
        assert_allclose(diff1(u, self.x), u.gradient_rule(self.x))
        assert_allclose(diff1(u, self.x, analytic=False), u.gradient_rule(self.x), atol=1e-8)
        assert_allclose(diff2(u, self.x, analytic=False), u.hessian_rule(self.x), atol=1e-6)

    def test_margin_enforced(self):
        F = quadratic(self.chart)
        with self.assertRaises(StepTooLarge):
            diff1(F, [0.9999, 0.0, 0.0], step=1e-4)
        with self.assertRaises(GeometryError):
            diff1(F, self.x, step=0.0)

    def test_richardson_exact_on_quartic(self):
        F = ScalarField(self.chart, lambda x: x[0] ** 4 - 2.0 * x[0] * x[1] ** 3 + x[2] ** 2)
        gradient, error = richardson_diff(F, self.x)
        x0, x1, x2 = self.x
        assert_allclose(gradient, [4 * x0**3 - 2 * x1**3, -6 * x0 * x1**2, 2 * x2], atol=1e-10)
        self.assertLess(error, 1e-9)

    def test_richardson_on_exponential(self):
        chart = ChartBox.cube(2, 1.0)
        F = ScalarField(chart, lambda x: math.exp(x[0]))
        gradient, error = richardson_diff(F, [0.0, 0.0])
        self.assertLessEqual(abs(gradient[0] - 1.0), error)
        self.assertEqual(gradient[1], 0.0)
        self.assertLess(error, 1e-8)

    def test_differences_are_linear(self):
        F = ScalarField(self.chart, lambda x: math.sin(x[0]) * x[1] + math.exp(x[2]))
        G = ScalarField(self.chart, lambda x: math.cos(x[1] - x[2]) - x[0] ** 3)
        total = F + G
        step = 2.0**-10
        assert_allclose(diff1(total, self.x, step), diff1(F, self.x, step) + diff1(G, self.x, step), atol=1e-12)
        step = 2.0**-6
        assert_allclose(diff2(total, self.x, step), diff2(F, self.x, step) + diff2(G, self.x, step), atol=1e-11)

    def test_scalar_sum_keeps_rules(self):
        u = stereographic_factor(self.chart)
        total = u + u
        assert_allclose(total.gradient_rule(self.x), 2.0 * u.gradient_rule(self.x))
        self.assertAlmostEqual(total(self.x), 2.0 * u(self.x))


class MetricFieldTests(SimpleTestCase):
    def test_round_sphere_jet_matches_differences(self):
        chart = ChartBox.cube(4, 0.5)
        g = round_sphere_metric(chart)
        x = np.array([0.1, -0.2, 0.3, 0.05])
        assert_allclose(g.derivative(x), g.derivative(x, analytic=False), atol=1e-7)

    def test_flat_metric_has_zero_jet(self):
        g = flat_metric(ChartBox.cube(2, 1.0))
        assert_allclose(g.derivative([0.1, 0.2]), np.zeros((2, 2, 2)))

    def test_singular_metric_rejected(self):
        chart = ChartBox.cube(2, 1.0)
        g = MetricField(chart, lambda x: np.diag([1.0, 1e-12]))
        with self.assertRaises(MetricSingular):
            g.inverse([0.0, 0.0])

    def test_inverse_is_symmetric(self):
        chart = ChartBox.cube(2, 1.0)
        g = MetricField(chart, lambda x: np.array([[2.0, 0.5], [0.5, 1.0]]))
        g_inv = g.inverse([0.0, 0.0])
        assert_allclose(g_inv, g_inv.T)
        assert_allclose(g_inv @ g([0.0, 0.0]), np.eye(2), atol=1e-14)


class FrameAndSamplingTests(SimpleTestCase):
    def test_frame_starts_with_first_axis(self):
        g = np.array([[4.0, 1.0], [1.0, 3.0]])
        E = gram_schmidt_frame(g)
        assert_allclose(E[:, 0], [0.5, 0.0])
        assert_allclose(E.T @ g @ E, np.eye(2), atol=1e-14)

    @hsettings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (4, 4), elements=st.floats(-2.0, 2.0)))
    def test_frame_is_orthonormal(self, a):
        g = a @ a.T + np.eye(4)
        E = gram_schmidt_frame(g)
        assert_allclose(E.T @ g @ E, np.eye(4), atol=1e-9)
        assert_allclose(np.tril(E, -1), 0.0)

    def test_sample_points_are_seeded(self):
        chart = ChartBox.cube(3, 1.0)
        first = sample_points(chart, 20, seed=7, margin=0.1)
        assert_allclose(first, sample_points(chart, 20, seed=7, margin=0.1))
        self.assertFalse(np.allclose(first, sample_points(chart, 20, seed=8, margin=0.1)))
        self.assertTrue(np.all(np.abs(first) <= 0.9))

    def test_sample_points_margin_too_large(self):
        with self.assertRaises(StepTooLarge):
            sample_points(ChartBox.cube(2, 0.1), 3, seed=0, margin=0.2)

    def test_stereographic_factor_value(self):
        u = stereographic_factor(ChartBox.cube(2, 1.0))
        self.assertAlmostEqual(u([0.0, 0.0]), math.log(2.0))
        self.assertAlmostEqual(u([0.5, 0.5]), math.log(2.0 / 1.5))
