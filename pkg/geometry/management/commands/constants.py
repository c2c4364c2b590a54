"""
Django management command printing the stability constant table
Run with: python manage.py constants --m 6..8 --format csv
"""

import logging

from geometry.management.base import RunRecordCommand
from geometry.records import Table
from geometry.stability import c_prime, c_prime_rough, constants
from geometry.validators import MRangeValidator

logger = logging.getLogger(__name__)

HEADER = ['m', 'n', 'p', 'xi', 'eps0', 'c2', 'c1', 'c_sharp', 'c_rough']


class Command(RunRecordCommand):
    help = 'Tabulate xi, eps0, c2, c1, c(m, n) and the rough bounds for every admissible (m, n)'
    command_name = 'constants'
    m_validator = MRangeValidator()

    def add_command_arguments(self, parser):
        parser.add_argument('--m', required=True, help=self.m_validator.get_help_text())

    def clean(self, options):
        return {'m': options['m'], 'm_values': self.m_validator.validate(options['m'])}

    def run(self, params, seed):
        record = self.new_record({'m': params['m']}, seed)
        rows, plot = [], []
        for m in params['m_values']:
            for n in range(1, m - 1):
                rows.append(constants(m, n).as_row())
                plot.append((n, rows[-1]['c_sharp']))
            plot.append(None)

        record.results = {
            'rows': rows,
            'c_prime': {str(m): {'sharp': c_prime(m), 'rough': c_prime_rough(m)} for m in params['m_values']},
        }
        record.table = Table(HEADER, [[row[key] for key in HEADER] for row in rows])
        record.plot = plot[:-1]
        logger.info(f'Computed {len(rows)} constant rows for m in {params["m_values"]}')
        return record
