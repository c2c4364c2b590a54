"""
Django management command solving for the admissible semi-axis interval
Run with: python manage.py range --threshold auto --basis both
"""

import logging

import numpy as np

from geometry.ellipsoid import (
    A_MAX,
    A_MIN,
    MAX_GRID_POINTS,
    EllipsoidSpec,
    admissible_range,
    cited_max_value,
    max_conf_ii,
    range_reconciliation,
)
from geometry.errors import ThresholdUnreachable
from geometry.management.base import RunRecordCommand
from geometry.records import Table
from geometry.validators import PositiveIntegerValidator, ThresholdValidator

logger = logging.getLogger(__name__)

BASIS_CHOICES = {
    'paper': ('paper_closed_form',),
    'measured': ('measured_max',),
    'both': ('paper_closed_form', 'measured_max'),
}
PLOT_POINTS = 151


class Command(RunRecordCommand):
    help = 'Semi-axis interval (a1, a2) on which the conformal |II|^2 maximum stays below a threshold'
    command_name = 'range'
    threshold_validator = ThresholdValidator()

    def add_command_arguments(self, parser):
        parser.add_argument('--threshold', required=True, help=self.threshold_validator.get_help_text())
        parser.add_argument('--basis', choices=sorted(BASIS_CHOICES), default='both',
                            help='Closed-form maximum, measured maximum, or both (default).')
        parser.add_argument('--grid', type=int, default=MAX_GRID_POINTS,
                            help=f't-grid size for the measured maximum (default {MAX_GRID_POINTS}).')

    def clean(self, options):
        return {
            'threshold': self.threshold_validator.validate(options['threshold']),
            'threshold_flag': str(options['threshold']),
            'basis': options['basis'],
            'grid': PositiveIntegerValidator('grid', minimum=3).validate(options['grid']),
        }

    def run(self, params, seed):
        record = self.new_record(params, seed)
        threshold = params['threshold']
        found = {}
        rows = []
        for basis in BASIS_CHOICES[params['basis']]:
            try:
                result = admissible_range(threshold, basis, grid_points=params['grid'])
            except ThresholdUnreachable as exc:
                logger.warning(f'{exc.message}')
                record.results[basis] = {'a1': None, 'a2': None, 'reason': exc.error_code}
                record.warn('threshold_unreachable')
                rows.append([basis, threshold, None, None])
                continue
            found[basis] = result
            record.results[basis] = {'a1': result.a1, 'a2': result.a2}
            rows.append([basis, threshold, result.a1, result.a2])

        if len(found) == 2:
            for warning in range_reconciliation(found['paper_closed_form'], found['measured_max']):
                record.warn(warning)

        record.table = Table(['basis', 'threshold', 'a1', 'a2'], rows)
        if self.output_format == 'plot':
            record.plot = self.extremum_curve(params)
        return record

    def extremum_curve(self, params):
        """(a, max |h_tilde|^2) around a = 1 for the first requested basis."""
        basis = BASIS_CHOICES[params['basis']][0]
        curve = []
        for a in np.geomspace(max(A_MIN, 0.25), min(A_MAX, 4.0), PLOT_POINTS):
            if basis == 'paper_closed_form':
                curve.append((a, cited_max_value(a)))
            else:
                curve.append((a, max_conf_ii(EllipsoidSpec(a, 4), params['grid'], report=False).max_value))
        return curve
