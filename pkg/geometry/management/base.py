"""
Shared base for the toolkit's management commands.

Subclasses implement ``clean(options)`` (argument interpretation, may raise
ValidationError or GeometryError: exit status 2) and ``run(params, seed)``
(the computation, returns a RunRecord). The base adds --format, --seed and
--out, writes the record once at the end and maps failing residual reports
to exit status 1.
"""

import logging

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.utils import timezone

from geometry.errors import GeometryError
from geometry.records import FORMATS, RunRecord, write_atomic

logger = logging.getLogger(__name__)

EXIT_RESIDUAL_FAILURE = 1
EXIT_USAGE = 2


class RunRecordCommand(BaseCommand):
    command_name = None
    output_format = 'json'

    def add_arguments(self, parser):
        parser.add_argument('--format', choices=FORMATS, default='json', dest='output_format',
                            help='Output format (default json).')
        parser.add_argument('--seed', type=int, default=None,
                            help='Random seed; defaults to CONFSTAB_SEED.')
        parser.add_argument('--out', default=None, help='Write the output to this file instead of stdout.')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def clean(self, options):
        raise NotImplementedError

    def run(self, params, seed):
        raise NotImplementedError

    def new_record(self, params, seed):
        return RunRecord(
            command=self.command_name,
            params=params,
            seed=seed,
            version=getattr(settings, 'CONFSTAB_VERSION', ''),
            timestamp=timezone.now().isoformat(),
        )

    def handle(self, *args, **options):
        self.output_format = options['output_format']
        seed = options['seed']
        if seed is None:
            seed = getattr(settings, 'CONFSTAB_SEED', 0)

        try:
            params = self.clean(options)
        except ValidationError as exc:
            raise CommandError('; '.join(exc.messages), returncode=EXIT_USAGE)
        except GeometryError as exc:
            raise CommandError(f'{exc.error_code}: {exc.message}', returncode=EXIT_USAGE)

        try:
            record = self.run(params, seed)
            text = record.render(options['output_format'])
        except GeometryError as exc:
            logger.error(f'{self.command_name} failed: {exc.error_code}: {exc.message}')
            code = EXIT_USAGE if exc.error_code == 'format-unavailable' else EXIT_RESIDUAL_FAILURE
            raise CommandError(f'{exc.error_code}: {exc.message}', returncode=code)

        if options['out']:
            write_atomic(options['out'], text)
        else:
            self.stdout.write(text, ending='')

        for warning in record.warnings:
            self.stderr.write(self.style.WARNING(f'warning: {warning}'))
        if not record.passed:
            raise CommandError(f'Residual check failed: {", ".join(record.failed_reports)}',
                               returncode=EXIT_RESIDUAL_FAILURE)
        self.stderr.write(self.style.SUCCESS(f'{self.command_name}: ok'))
