import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from geometry.curvature import (
    Riemann4,
    bianchi_residual,
    christoffel,
    frame_components,
    pinch_scan,
    riemann,
    riemann_symmetry_residual,
    sectional,
)
from geometry.errors import DegenerateSpan, GeometryError, PointOutsideChart, StepTooLarge
from geometry.fields import ChartBox, MetricField, flat_metric, gram_schmidt_frame, round_sphere_metric
from geometry.immersion import ellipsoid_graph, induced_metric, sphere_graph


def constant_curvature_tensor(dim, K):
    identity = np.eye(dim)
    return K * (np.einsum('ac,bd->abcd', identity, identity) - np.einsum('ad,bc->abcd', identity, identity))


def poincare_ball_metric(chart):
    """4 / (1 - |x|^2)^2 times the identity; curvature -1."""
    dim = chart.dim

    def jet(x):
        s = 1.0 - x @ x
        return np.einsum('k,ij->kij', 16.0 * x / s**3, np.eye(dim))

    return MetricField(chart, lambda x: 4.0 / (1.0 - x @ x) ** 2 * np.eye(dim), jet)


class ChristoffelTests(SimpleTestCase):
    def test_flat_connection_vanishes(self):
        g = flat_metric(ChartBox.cube(3, 1.0))
        assert_allclose(christoffel(g, [0.1, 0.2, 0.3]), np.zeros((3, 3, 3)))

    def test_conformally_flat_symbols(self):
        # g = e^{2v} I gives G^a_bc = v_b delta_ac + v_c delta_ab - v_a delta_bc
        chart = ChartBox.cube(3, 0.5)
        g = round_sphere_metric(chart)
        x = np.array([0.1, -0.2, 0.25])
        v = -2.0 * x / (1.0 + x @ x)
        identity = np.eye(3)
        expected = (np.einsum('b,ac->abc', v, identity) + np.einsum('c,ab->abc', v, identity)
                    - np.einsum('a,bc->abc', v, identity))
        assert_allclose(christoffel(g, x), expected, atol=1e-12)


class RiemannTests(SimpleTestCase):
    def setUp(self):
        self.chart = ChartBox.cube(4, 0.5)
        self.x = np.array([0.1, -0.2, 0.3, 0.05])

    def test_round_sphere_has_unit_curvature(self):
        g = round_sphere_metric(self.chart)
        R = riemann(g, self.x)
        components = frame_components(R, gram_schmidt_frame(g(self.x)))
        assert_allclose(components, constant_curvature_tensor(4, 1.0), atol=1e-6)

    def test_poincare_ball_has_negative_curvature(self):
        chart = ChartBox.cube(3, 0.4)
        g = poincare_ball_metric(chart)
        x = np.array([0.1, 0.05, -0.15])
        components = frame_components(riemann(g, x), gram_schmidt_frame(g(x)))
        assert_allclose(components, constant_curvature_tensor(3, -1.0), atol=1e-6)

    def test_flat_metric_is_flat(self):
        g = flat_metric(self.chart)
        assert_allclose(riemann(g, self.x).components, 0.0)

    def test_finite_difference_jet(self):
        g = round_sphere_metric(self.chart)
        analytic = riemann(g, self.x)
        numeric = riemann(g, self.x, analytic=False)
        assert_allclose(numeric.components, analytic.components, atol=1e-5)

    def test_algebraic_symmetries_hold(self):
        R = riemann(round_sphere_metric(self.chart), self.x)
        self.assertLess(riemann_symmetry_residual(R), 1e-12)
        self.assertLess(bianchi_residual(R), 1e-12)
        self.assertLess(R.symmetrization_defect, 1e-6)
        self.assertEqual(R.basepoint, tuple(self.x.tolist()))

    def test_residuals_detect_broken_symmetry(self):
        components = constant_curvature_tensor(3, 1.0)
        components[0, 1, 0, 1] += 1e-3
        R = Riemann4(components=components, basepoint=(0.0, 0.0, 0.0))
        self.assertAlmostEqual(riemann_symmetry_residual(R), 1e-3, delta=1e-15)
        self.assertAlmostEqual(bianchi_residual(R), 1e-3, delta=1e-15)

    def test_margin_enforced(self):
        g = round_sphere_metric(self.chart)
        with self.assertRaises(StepTooLarge):
            riemann(g, [0.4995, 0.0, 0.0, 0.0])
        with self.assertRaises(PointOutsideChart):
            riemann(g, [0.6, 0.0, 0.0, 0.0])


class SectionalTests(SimpleTestCase):
    def setUp(self):
        self.chart = ChartBox.cube(4, 0.5)
        self.g = round_sphere_metric(self.chart)
        self.x = np.array([0.2, 0.1, -0.1, 0.0])
        self.R = riemann(self.g, self.x)

    def test_random_planes_on_round_sphere(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            X, Y = rng.standard_normal(4), rng.standard_normal(4)
            self.assertAlmostEqual(sectional(self.R, self.g(self.x), (X, Y)), 1.0, delta=1e-6)

    def test_scale_invariance(self):
        X = np.array([1.0, 0.0, 0.5, 0.0])
        Y = np.array([0.0, 1.0, 0.0, -0.25])
        g = self.g(self.x)
        self.assertAlmostEqual(sectional(self.R, g, (X, Y)), sectional(self.R, g, (3.0 * X, X - 2.0 * Y)), places=10)

    def test_ellipsoid_tip_matches_principal_curvatures(self):
        # every principal curvature equals a at the tip, so K = a^2
        imm = ellipsoid_graph(0.8, 4)
        g = induced_metric(imm)
        x = np.zeros(4)
        R = riemann(g, x)
        identity = np.eye(4)
        for i in range(4):
            for j in range(i + 1, 4):
                self.assertAlmostEqual(sectional(R, g(x), (identity[i], identity[j])), 0.64, delta=1e-4)
        rng = np.random.default_rng(8)
        for _ in range(5):
            X, Y = rng.standard_normal((2, 4))
            self.assertAlmostEqual(sectional(R, g(x), (X, Y)), 0.64, delta=1e-4)

    def test_degenerate_span(self):
        X = np.array([1.0, 0.0, 0.0, 0.0])
        with self.assertRaises(DegenerateSpan):
            sectional(self.R, self.g(self.x), (X, 2.0 * X))


class PinchScanTests(SimpleTestCase):
    def test_unit_sphere_is_round(self):
        imm = sphere_graph(4)
        report = pinch_scan(induced_metric(imm), imm.chart, n_points=3, n_planes=4, seed=0)
        self.assertAlmostEqual(report.delta, 1.0, delta=1e-5)
        self.assertAlmostEqual(report.K_max, 1.0, delta=1e-5)
        # six frame planes plus four random ones per point
        self.assertEqual(report.planes_sampled, 30)
        self.assertEqual(report.points_sampled, 3)

    def test_seeded_scan_is_reproducible(self):
        chart = ChartBox.cube(3, 0.4)
        g = poincare_ball_metric(chart)
        first = pinch_scan(g, chart, 2, 3, seed=11)
        second = pinch_scan(g, chart, 2, 3, seed=11)
        self.assertEqual(first.as_dict(), second.as_dict())
        self.assertEqual(first.argmin, second.argmin)

    def test_non_positive_maximum_gives_nan_delta(self):
        chart = ChartBox.cube(3, 0.4)
        report = pinch_scan(poincare_ball_metric(chart), chart, 2, 2, seed=0)
        self.assertTrue(math.isnan(report.delta))
        self.assertAlmostEqual(report.K_min, -1.0, delta=1e-5)

    def test_invalid_counts(self):
        chart = ChartBox.cube(2, 0.4)
        with self.assertRaises(GeometryError) as ctx:
            pinch_scan(flat_metric(chart), chart, 0, 1, seed=0)
        self.assertEqual(ctx.exception.error_code, 'invalid-argument')
