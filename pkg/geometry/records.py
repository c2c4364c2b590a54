"""
Run records: the single output object of every management command.

A record serializes to JSON (fixed key order, non-finite numbers as null),
to CSV (the command's table, 17 significant digits) or to two-column plot
data. Writing to a file goes through a temporary file in the target
directory followed by os.replace, so a reader never sees a partial record.
"""

import csv
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from .errors import GeometryError

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'plot')


def clean_value(value):
    """numpy scalars and arrays to plain Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): clean_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_value(v) for v in value]
    if isinstance(value, np.ndarray):
        return clean_value(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, 'as_dict'):
        return clean_value(value.as_dict())
    return value


def format_number(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g') if math.isfinite(value) else 'nan'
    return str(value)


@dataclass
class Table:
    header: list
    rows: list = field(default_factory=list)


@dataclass
class RunRecord:
    command: str
    params: dict
    seed: int
    version: str
    results: dict = field(default_factory=dict)
    residuals: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timestamp: str = ''
    # Output-format views of the results; not part of the JSON record
    table: Optional[Table] = None
    plot: Optional[list] = None

    @property
    def passed(self):
        return all(report.passed for report in self.residuals)

    @property
    def failed_reports(self):
        return [report.identity_name for report in self.residuals if not report.passed]

    def warn(self, code):
        if code not in self.warnings:
            self.warnings.append(code)

    def as_dict(self):
        return {
            'command': self.command,
            'params': clean_value(self.params),
            'results': clean_value(self.results),
            'residuals': [clean_value(report) for report in self.residuals],
            'warnings': list(self.warnings),
            'seed': self.seed,
            'version': self.version,
            'timestamp': self.timestamp,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), cls=DjangoJSONEncoder, indent=2, allow_nan=False)

    def to_csv(self):
        if self.table is None:
            raise GeometryError(f'{self.command} has no tabular output', error_code='format-unavailable')
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.table.header)
        for row in self.table.rows:
            writer.writerow([format_number(value) for value in row])
        return buffer.getvalue()

    def to_plot(self):
        if not self.plot:
            raise GeometryError(f'{self.command} has no plot output', error_code='format-unavailable')
        lines = []
        for point in self.plot:
            # None separates data blocks
            lines.append('' if point is None else f'{format_number(point[0])} {format_number(point[1])}')
        return '\n'.join(lines) + '\n'

    def render(self, output_format):
        if output_format == 'json':
            return self.to_json() + '\n'
        if output_format == 'csv':
            return self.to_csv()
        if output_format == 'plot':
            return self.to_plot()
        raise GeometryError(f'Unknown format {output_format!r}', error_code='invalid-format')


def _current_umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary sibling file and os.replace."""
    directory = os.path.dirname(os.path.abspath(path))
    handle, temp_path = tempfile.mkstemp(dir=directory, prefix='.confstab-', suffix='.tmp')
    try:
        with os.fdopen(handle, 'w', encoding='utf-8', newline='') as stream:
            stream.write(text)
        os.chmod(temp_path, 0o666 & ~_current_umask())
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
    logger.info(f'Wrote run record to {path}')
