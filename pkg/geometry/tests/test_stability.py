import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hsettings, strategies as st
from hypothesis.extra.numpy import arrays

from geometry import stability
from geometry.errors import GeometryError, InvalidDimensions, PLessThanTwo
from geometry.stability import AlgII


def normal_identity(n, p):
    """b_{alpha alpha} = 1 on every M-normal direction, zero elsewhere."""
    b = np.zeros((1, n + p, n + p))
    b[0, n:, n:] = np.eye(p)
    return AlgII(n, p, 1, b)


class ConstantTableTests(SimpleTestCase):
    def test_four_dimensional_values(self):
        self.assertAlmostEqual(stability.constants(4, 1).c_sharp, 6 / 5, delta=1e-12)
        self.assertAlmostEqual(stability.constants(4, 2).c_sharp, math.sqrt(5) - 1, delta=1e-12)
        self.assertAlmostEqual(stability.c_prime(4), 6 / 5, delta=1e-12)

    def test_table_identities(self):
        for m in range(3, 13):
            self.assertAlmostEqual(stability.c_prime_rough(m), 2 - 4 / m, delta=1e-15)
            for n in range(1, m - 1):
                row = stability.constants(m, n)
                p = m - n
                self.assertEqual(row.p, p)
                self.assertAlmostEqual(row.eps0**2 - row.eps0 - p / n, 0.0, delta=1e-12)
                self.assertGreaterEqual(row.c_sharp, row.c_rough - 1e-12)
                self.assertAlmostEqual(row.c1, row.c2 / p, delta=1e-15)
                if n == 1:
                    self.assertAlmostEqual(row.c_sharp, 2 - 4 / (m + 1), delta=1e-12)
                    self.assertAlmostEqual(row.c_rough, 2 - 4 / (m + 1), delta=1e-12)
                else:
                    self.assertAlmostEqual(row.c_rough, n * (m - n) / m, delta=1e-12)

    def test_xi(self):
        self.assertEqual([stability.xi(m) for m in range(3, 9)], [1, 1, 1, 2, 2, 2])
        with self.assertRaises(InvalidDimensions):
            stability.xi(2)

    def test_c_prime_starts_at_xi(self):
        # for m >= 6 the n = 1 entry is excluded
        expected = min(stability.constants(7, n).c_sharp for n in range(2, 6))
        self.assertAlmostEqual(stability.c_prime(7), expected, delta=1e-15)

    def test_invalid_dimensions(self):
        for m, n in ((2, 1), (4, 3), (5, 0)):
            with self.assertRaises(InvalidDimensions):
                stability.constants(m, n)

    def test_epsilon_family(self):
        row = stability.constants(6, 2)
        mixed, tangent, normal = stability.eps_bound_coefficients(2, 4, row.eps0)
        self.assertAlmostEqual(tangent, normal, delta=1e-12)
        self.assertAlmostEqual(stability.c1_for_eps(2, 4, row.eps0), row.c1, delta=1e-12)
        # any other epsilon gives a weaker constant
        for eps in (0.5, 1.0, 2.0, 5.0):
            self.assertGreaterEqual(stability.c1_for_eps(2, 4, eps), row.c1 - 1e-12)
        with self.assertRaises(GeometryError):
            stability.eps_bound_coefficients(2, 4, 0.0)


class CurvatureTermTests(SimpleTestCase):
    def test_coefficient_values(self):
        self.assertEqual(stability.curvature_term_coefficient(2, 2, 1), 0)
        self.assertEqual(stability.curvature_term_coefficient(1, 4, 0.5), 0)
        self.assertEqual(stability.curvature_term_coefficient(1, 5, 0.5), 0.25)

    def test_ambient_curvature_term(self):
        self.assertAlmostEqual(stability.ambient_curvature_term(3.0, 2.0, 2, 3), -1.0 - 2 / 3)
        self.assertEqual(stability.ambient_curvature_term(5.0, 0.0, 1, 2), 0.0)
        with self.assertRaises(PLessThanTwo):
            stability.ambient_curvature_term(1.0, 1.0, 2, 1)

    def test_second_variation_rhs(self):
        self.assertAlmostEqual(stability.prop33_rhs(1.0, 2.0, 3.0, 0.5, n=2, p=2, a=2.0), 1 + 4 + 6 - 0.5)
        self.assertEqual(stability.prop33_rhs(1.0, 1.0, 0.0, 2.0, n=2, p=2, a=1.0), -1.0)
        with self.assertRaises(GeometryError):
            stability.prop33_rhs(-1.0, 0.0, 0.0, 0.0, n=2, p=2, a=1.0)

    def test_sign_conditions(self):
        verdict = stability.stability_sign_conditions(AlgII.zeros(2, 2), 1.0, 1.0, a=1.0)
        self.assertTrue(verdict.curvature_ok)
        self.assertTrue(verdict.coefficient_ok)
        self.assertEqual(verdict.functional_gap, -2.0)
        self.assertTrue(verdict.unstable)

        verdict = stability.stability_sign_conditions(AlgII.zeros(2, 2), -1.0, 1.0, a=1.0)
        self.assertFalse(verdict.curvature_ok)
        self.assertFalse(verdict.unstable)

        verdict = stability.stability_sign_conditions(normal_identity(2, 2), 0.0, 0.0, a=1.0)
        self.assertEqual(verdict.functional_gap, 0.0)
        self.assertFalse(verdict.functional_ok)


class FunctionalTests(SimpleTestCase):
    def test_known_values(self):
        self.assertEqual(stability.f_functional(AlgII.zeros(2, 3, 2)), 0.0)
        self.assertAlmostEqual(stability.f_functional(normal_identity(3, 2)), 3.0)
        b = normal_identity(3, 2).b.copy()
        b[0, :3, :3] = np.eye(3)
        # the cross term subtracts 2/p * n * p
        self.assertAlmostEqual(stability.f_functional(AlgII(3, 2, 1, b)), -3.0)

    def test_single_mixed_component(self):
        for n, p in ((1, 2), (2, 3), (3, 4)):
            b = AlgII.zeros(n, p)
            b.b[0, 0, n] = b.b[0, n, 0] = 1.0
            self.assertAlmostEqual(stability.f_functional(b), 1 + 2 / p)
            self.assertEqual(stability.norm_sq(b), 2.0)

    def test_norm_counts_ordered_pairs(self):
        b = AlgII.zeros(1, 2)
        b.b[0, 1, 1] = 1.0
        self.assertEqual(stability.norm_sq(b), 1.0)
        b.b[0, 0, 2] = b.b[0, 2, 0] = 1.0
        self.assertEqual(stability.norm_sq(b), 3.0)

    def test_quadratic_and_rotation_invariant(self):
        rng = np.random.default_rng(4)
        raw = rng.standard_normal((3, 5, 5))
        b = AlgII(2, 3, 3, raw + np.swapaxes(raw, 1, 2))
        value = stability.f_functional(b)
        scaled = AlgII(2, 3, 3, 2.5 * b.b)
        self.assertAlmostEqual(stability.f_functional(scaled), 6.25 * value, delta=1e-11 * max(1.0, abs(value)))
        rotation, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = AlgII(2, 3, 3, np.einsum('mk,kab->mab', rotation, b.b))
        self.assertAlmostEqual(stability.f_functional(rotated), value, delta=1e-10)
        self.assertAlmostEqual(stability.norm_sq(rotated), stability.norm_sq(b), delta=1e-10)

    def test_validation(self):
        with self.assertRaises(PLessThanTwo):
            stability.f_functional(AlgII.zeros(2, 1))
        with self.assertRaises(InvalidDimensions):
            AlgII(1, 2, 1, np.zeros((1, 2, 2)))
        b = np.zeros((1, 3, 3))
        b[0, 0, 1] = 1.0
        with self.assertRaises(GeometryError) as ctx:
            AlgII(1, 2, 1, b)
        self.assertEqual(ctx.exception.error_code, 'asymmetric-tensor')

    @hsettings(max_examples=100, deadline=None)
    @given(arrays(np.float64, (2, 5, 5), elements=st.floats(-10.0, 10.0)))
    def test_lemma_bound_slack(self, raw):
        b = AlgII(2, 3, 2, raw + np.swapaxes(raw, 1, 2))
        result = stability.lemma_bound(b)
        self.assertGreaterEqual(result.slack, -1e-9 * max(1.0, result.bound))
        self.assertAlmostEqual(result.bound, stability.constants(5, 2).c1 * stability.norm_sq(b))


class AuditTests(SimpleTestCase):
    def test_no_violations(self):
        for n, p, q in ((1, 2, 1), (1, 4, 2), (2, 2, 1), (2, 3, 2), (3, 2, 2)):
            for seed in range(10):
                result = stability.bound_audit(n, p, q, 100_000, seed=seed)
                self.assertEqual(result.violations, 0, (n, p, q, seed))
                self.assertLessEqual(result.max_ratio, result.c1 + 1e-10)
                self.assertEqual(result.iterations, 100_000)

    def test_audit_for_one_dimensional_submanifold(self):
        # c1(5, 1) = c2/p = 3/4; the 4/3 quoted next to it is c(5, 1)
        result = stability.bound_audit(1, 4, 2, 1000, seed=1)
        self.assertAlmostEqual(result.c1, 3 / 4, delta=1e-12)
        self.assertAlmostEqual(stability.constants(5, 1).c_sharp, 4 / 3, delta=1e-12)
        self.assertLessEqual(result.max_ratio, 4 / 3 + 1e-10)

    def test_mixed_tensors_hit_fixed_ratio(self):
        for p in (2, 3, 5):
            result = stability.bound_audit(2, p, 1, 500, seed=2, sampler='mixed')
            self.assertAlmostEqual(result.max_ratio, (p + 2) / (2 * p), delta=1e-12)

    def test_block_layout_is_deterministic(self):
        first = stability.bound_audit(2, 2, 1, 2500, seed=9, block_size=1000)
        second = stability.bound_audit(2, 2, 1, 2500, seed=9, block_size=1000)
        self.assertEqual(first, second)
        other = stability.bound_audit(2, 2, 1, 2500, seed=10, block_size=1000)
        self.assertNotEqual(first.max_ratio, other.max_ratio)

    def test_invalid_arguments(self):
        with self.assertRaises(GeometryError) as ctx:
            stability.bound_audit(2, 2, 1, 0, seed=0)
        self.assertEqual(ctx.exception.error_code, 'invalid-argument')
        with self.assertRaises(PLessThanTwo):
            stability.bound_audit(2, 1, 1, 10, seed=0)
        with self.assertRaises(GeometryError):
            stability.bound_audit(2, 2, 1, 10, seed=0, sampler='diagonal')

    def test_sharpest_ratio_between_audit_and_c1(self):
        for n, p in ((1, 2), (2, 2), (2, 3)):
            sharp = stability.sharpest_ratio(n, p)
            c1 = stability.constants(n + p, n).c1
            audit = stability.bound_audit(n, p, 1, 20_000, seed=0)
            self.assertLessEqual(sharp, c1 + 1e-10)
            self.assertGreaterEqual(sharp, audit.max_ratio - 1e-10)
            self.assertGreaterEqual(sharp, (p + 2) / (2 * p) - 1e-12)
