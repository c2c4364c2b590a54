from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from geometry.validators import (
    MRangeValidator,
    PositiveIntegerValidator,
    PositiveNumberValidator,
    StencilMarginValidator,
    ThresholdValidator,
    VerifyCaseValidator,
)


class MRangeValidatorTests(SimpleTestCase):
    def test_single_and_range(self):
        validator = MRangeValidator()
        self.assertEqual(validator.validate('4'), [4])
        self.assertEqual(validator.validate('6..8'), [6, 7, 8])
        self.assertEqual(validator.validate(' 3 .. 3 '), [3])

    def test_errors(self):
        validator = MRangeValidator()
        for value, code in (('abc', 'invalid-m-range'), ('8..6', 'invalid-m-range'), ('2', 'invalid-dimensions'),
                            ('2..5', 'invalid-dimensions'), ('-4', 'invalid-m-range')):
            with self.assertRaises(ValidationError) as ctx:
                validator.validate(value)
            self.assertEqual(ctx.exception.code, code, value)


class NumberValidatorTests(SimpleTestCase):
    def test_positive_integer(self):
        self.assertEqual(PositiveIntegerValidator('iters').validate(5), 5)
        self.assertEqual(PositiveIntegerValidator('samples', minimum=0).validate(0), 0)
        with self.assertRaises(ValidationError) as ctx:
            PositiveIntegerValidator('iters').validate(0)
        self.assertEqual(ctx.exception.code, 'invalid-argument')
        self.assertIn('--iters', ctx.exception.messages[0])

    def test_positive_number(self):
        self.assertEqual(PositiveNumberValidator('a').validate('0.5'), 0.5)
        for value in ('0', '-1', 'nan', 'inf', 'x', None):
            with self.assertRaises(ValidationError):
                PositiveNumberValidator('a').validate(value)

    def test_threshold_auto(self):
        self.assertAlmostEqual(ThresholdValidator().validate('auto'), 6 / 5, delta=1e-12)
        self.assertAlmostEqual(ThresholdValidator().validate('AUTO'), 6 / 5, delta=1e-12)
        self.assertEqual(ThresholdValidator().validate('2.5'), 2.5)
        with self.assertRaises(ValidationError):
            ThresholdValidator().validate('-1')


class VerifyCaseValidatorTests(SimpleTestCase):
    def test_cases(self):
        validator = VerifyCaseValidator()
        self.assertEqual(validator.validate('curvature:sphere'), ('curvature', 'sphere'))
        self.assertEqual(validator.validate('gauss:ellipsoid'), ('gauss', 'ellipsoid'))
        for value in ('curvature', 'ricci:sphere', 'grad:torus', ''):
            with self.assertRaises(ValidationError) as ctx:
                validator.validate(value)
            self.assertEqual(ctx.exception.code, 'unknown-case')


class StencilMarginValidatorTests(SimpleTestCase):
    def test_margin_inside_chart(self):
        self.assertAlmostEqual(StencilMarginValidator(0.5).validate(1e-4, 1e-3), 1.2e-3, delta=1e-15)

    def test_margin_reaching_chart_edge(self):
        for step, outer_step in ((0.3, 1e-3), (0.2, 0.1), (1e-4, 0.5)):
            with self.assertRaises(ValidationError) as ctx:
                StencilMarginValidator(0.5).validate(step, outer_step)
            self.assertEqual(ctx.exception.code, 'step-too-large-for-margin', (step, outer_step))
