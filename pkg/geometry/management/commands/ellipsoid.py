"""
Django management command reproducing the ellipsoid computation
Run with: python manage.py ellipsoid --a 0.5 --n 4
"""

import logging

import numpy as np

from geometry.ellipsoid import (
    EllipsoidSpec,
    cited_sectional_bounds,
    closed_vs_oracle,
    condensed_display_gap,
    conformal_invariant_bound,
    g_poly,
    grid_sectional_range,
    htilde_profile,
    max_conf_ii,
    pinching_delta,
    point_data,
    sectional_bounds,
    sectional_range_notes,
)
from geometry.fields import ChartBox, sample_points
from geometry.management.base import RunRecordCommand
from geometry.records import Table
from geometry.validators import PositiveIntegerValidator, PositiveNumberValidator

logger = logging.getLogger(__name__)

CONDENSED_GAP_SAMPLES = 11


class Command(RunRecordCommand):
    help = 'Closed forms, G_n grid, conformal |II|^2 maximum and pinching data for one ellipsoid'
    command_name = 'ellipsoid'

    def add_command_arguments(self, parser):
        parser.add_argument('--a', type=float, required=True, help='Polar semi-axis a > 0.')
        parser.add_argument('--n', type=int, default=4, help='Ellipsoid dimension (default 4).')
        parser.add_argument('--grid', type=int, default=1000, help='Points on the t-grid (default 1000).')
        parser.add_argument('--samples', type=int, default=5, help='Random point-data samples (default 5).')

    def clean(self, options):
        return {
            'a': PositiveNumberValidator('a').validate(options['a']),
            'n': PositiveIntegerValidator('n', minimum=2).validate(options['n']),
            'grid': PositiveIntegerValidator('grid', minimum=2).validate(options['grid']),
            'samples': PositiveIntegerValidator('samples', minimum=0).validate(options['samples']),
        }

    def run(self, params, seed):
        spec = EllipsoidSpec(params['a'], params['n'])
        a, n = spec.a, spec.n
        record = self.new_record(params, seed)

        chart = ChartBox.cube(n, 0.8 / np.sqrt(n))
        samples = []
        for x in sample_points(chart, params['samples'], seed):
            data = point_data(spec, x)
            samples.append({
                'x': data.x, 'f': data.f, 'w': data.w, 'gradf_sq': data.gradf_sq, 'nH': data.nH,
                'normSqH': data.normSqH, 'e_u': data.e_u, 'u_normal': data.u_normal, 'htilde_sq': data.htilde_sq,
            })

        t = np.linspace(a**2 * 1e-6, a**2, params['grid'])
        G = g_poly(spec, t)
        htilde = htilde_profile(spec, t)
        gap_t = np.linspace(a**2 * 1e-3, a**2, CONDENSED_GAP_SAMPLES)
        gaps = [condensed_display_gap(spec, value) for value in gap_t]

        maximum = max_conf_ii(spec)
        analytic = sectional_bounds(spec)
        cited = cited_sectional_bounds(spec)
        invariant = conformal_invariant_bound(spec, maximum=maximum)
        grid_sectional = grid_sectional_range(spec, t)

        record.residuals.append(closed_vs_oracle(spec, params['grid']))
        record.results = {
            'point_samples': samples,
            'endpoints': {'G_0': g_poly(spec, 0.0), 'G_a2': g_poly(spec, a**2),
                          'htilde_sq_equator': spec.prefactor * g_poly(spec, 0.0),
                          'htilde_sq_tip': spec.prefactor * g_poly(spec, a**2)},
            'max_conf_ii': maximum,
            'pinching_delta': pinching_delta(spec),
            'sectional_bounds': {'analytic': list(analytic), 'cited': list(cited), 'grid': list(grid_sectional)},
            'condensed_display_gap': {'t': gap_t, 'gap': gaps, 'max_abs': float(np.max(np.abs(gaps)))},
            'conformal_invariant_bound': {'bound': invariant.bound, 'c_prime': invariant.c_prime,
                                          'below_c_prime': invariant.below_c_prime},
        }

        if maximum.agrees is False:
            record.warn('paper_closed_form_disagreement')
        for note in sectional_range_notes(spec, *grid_sectional):
            record.warn(note)

        record.table = Table(['t', 'G', 'htilde_sq'], [list(row) for row in zip(t, G, htilde)])
        record.plot = list(zip(t, htilde))
        return record
