"""
Django management command auditing F(II) <= c1 |II|^2 on random tensors
Run with: python manage.py audit --n 2 --p 2 --q 1 --iters 100000 --seed 0
"""

import logging

from geometry.conformal import ResidualReport
from geometry.management.base import RunRecordCommand
from geometry.records import Table
from geometry.stability import AUDIT_TOLERANCE, bound_audit, require_p, sharpest_ratio
from geometry.validators import PositiveIntegerValidator

logger = logging.getLogger(__name__)


class Command(RunRecordCommand):
    help = 'Randomized audit of the bound F(II) <= c1 |II|^2'
    command_name = 'audit'

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, default=2, help='Tangent dimension n (default 2).')
        parser.add_argument('--p', type=int, default=2, help='Normal dimension p >= 2 inside M (default 2).')
        parser.add_argument('--q', type=int, default=1, help='Normal dimension of M in the sphere (default 1).')
        parser.add_argument('--iters', type=int, default=100_000, help='Number of samples (default 100000).')
        parser.add_argument('--sampler', choices=('full', 'mixed'), default='full',
                            help='Draw full symmetric tensors or mixed-block-only ones.')
        parser.add_argument('--sharp', action='store_true',
                            help='Also report the exact supremum of F/|II|^2.')

    def clean(self, options):
        params = {
            'n': PositiveIntegerValidator('n').validate(options['n']),
            'p': PositiveIntegerValidator('p').validate(options['p']),
            'q': PositiveIntegerValidator('q').validate(options['q']),
            'iters': PositiveIntegerValidator('iters').validate(options['iters']),
            'sampler': options['sampler'],
            'sharp': bool(options['sharp']),
        }
        require_p(params['p'])
        return params

    def run(self, params, seed):
        record = self.new_record(params, seed)
        result = bound_audit(params['n'], params['p'], params['q'], params['iters'], seed, sampler=params['sampler'])
        record.results = {
            'max_ratio': result.max_ratio,
            'c1': result.c1,
            'violations': result.violations,
            'iterations': result.iterations,
            'resampled': result.resampled,
        }
        if params['sharp']:
            record.results['sharpest_ratio'] = sharpest_ratio(params['n'], params['p'])

        record.residuals.append(ResidualReport('lemma_bound', max(0.0, result.max_ratio - result.c1),
                                               result.iterations, 0.0, AUDIT_TOLERANCE))
        record.table = Table(
            ['n', 'p', 'q', 'iterations', 'max_ratio', 'c1', 'violations'],
            [[params['n'], params['p'], params['q'], result.iterations, result.max_ratio, result.c1,
              result.violations]],
        )
        return record
