"""
Argument validators for the management commands.

Each validator follows the same shape: ``validate(value)`` returns the
cleaned value or raises ``django.core.exceptions.ValidationError`` with a
stable ``code``; ``get_help_text()`` is used for the argparse help strings.
The base command turns a ValidationError into exit status 2.
"""

import math
import re

from django.core.exceptions import ValidationError
from django.utils.translation import gettext as _

from .stability import c_prime

VERIFY_KINDS = ('grad', 'hessian', 'curvature', 'gauss', 'pinch')
VERIFY_BASES = ('sphere', 'ellipsoid')


class MRangeValidator:
    """
    Parses an ambient-dimension range: a single integer ``"4"`` or an
    inclusive range ``"6..8"``. Every m must be at least ``min_m``.
    """

    pattern = re.compile(r'^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$')

    def __init__(self, min_m=3):
        self.min_m = min_m

    def validate(self, value):
        match = self.pattern.match(str(value))
        if not match:
            raise ValidationError(
                _('Invalid m range "%(value)s"; use an integer like 4 or a range like 6..8.'),
                code='invalid-m-range',
                params={'value': value},
            )
        low = int(match.group(1))
        high = int(match.group(2)) if match.group(2) else low
        if low > high:
            raise ValidationError(
                _('m range %(low)d..%(high)d is empty.'),
                code='invalid-m-range',
                params={'low': low, 'high': high},
            )
        if low < self.min_m:
            raise ValidationError(
                _('Every m must be at least %(min_m)d, got %(low)d.'),
                code='invalid-dimensions',
                params={'min_m': self.min_m, 'low': low},
            )
        return list(range(low, high + 1))

    def get_help_text(self):
        return _('Ambient dimension m (>= %(min_m)d) or an inclusive range a..b.') % {'min_m': self.min_m}


class PositiveIntegerValidator:
    def __init__(self, name, minimum=1):
        self.name = name
        self.minimum = minimum

    def validate(self, value):
        if value is None or int(value) < self.minimum:
            raise ValidationError(
                _('--%(name)s must be at least %(minimum)d, got %(value)s.'),
                code='invalid-argument',
                params={'name': self.name, 'minimum': self.minimum, 'value': value},
            )
        return int(value)

    def get_help_text(self):
        return _('Integer >= %(minimum)d.') % {'minimum': self.minimum}


class PositiveNumberValidator:
    def __init__(self, name):
        self.name = name

    def validate(self, value):
        try:
            number = float(value)
        except (TypeError, ValueError):
            number = math.nan
        if not (math.isfinite(number) and number > 0.0):
            raise ValidationError(
                _('--%(name)s must be a positive finite number, got %(value)s.'),
                code='invalid-argument',
                params={'name': self.name, 'value': value},
            )
        return number

    def get_help_text(self):
        return _('Positive finite number.')


class ThresholdValidator(PositiveNumberValidator):
    """A positive threshold, or ``auto`` for c'(m) of the four-dimensional ellipsoid."""

    auto_m = 4

    def __init__(self):
        super().__init__('threshold')

    def validate(self, value):
        if str(value).strip().lower() == 'auto':
            return c_prime(self.auto_m)
        return super().validate(value)

    def get_help_text(self):
        return _('Positive number or "auto" (uses c\'(4) = 6/5).')


class VerifyCaseValidator:
    """``kind:base`` with kind in grad/hessian/curvature/gauss/pinch and base in sphere/ellipsoid."""

    def validate(self, value):
        kind, _sep, base = str(value).partition(':')
        if kind not in VERIFY_KINDS or base not in VERIFY_BASES:
            raise ValidationError(
                _('Unknown case "%(value)s"; expected one of %(kinds)s followed by :sphere or :ellipsoid.'),
                code='unknown-case',
                params={'value': value, 'kinds': '/'.join(VERIFY_KINDS)},
            )
        return kind, base

    def get_help_text(self):
        return _('Residual check to run, e.g. curvature:sphere or gauss:ellipsoid.')


class StencilMarginValidator:
    """
    The difference stencil (outer step + 2 * step) has to fit strictly
    inside a chart of the given half-width, or no sample point exists.
    """

    def __init__(self, half_width):
        self.half_width = half_width

    def validate(self, step, outer_step):
        margin = outer_step + 2.0 * step
        if margin >= self.half_width:
            raise ValidationError(
                _('--step %(step)g and --outer-step %(outer_step)g need a margin of %(margin)g, '
                  'but the chart half-width is %(half_width)g.'),
                code='step-too-large-for-margin',
                params={'step': step, 'outer_step': outer_step, 'margin': margin, 'half_width': self.half_width},
            )
        return margin

    def get_help_text(self):
        return _('outer step + 2 * step must stay below %(half_width)g.') % {'half_width': self.half_width}
