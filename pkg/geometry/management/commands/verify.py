"""
Django management command running one residual check
Run with: python manage.py verify --case curvature:sphere
"""

import logging

import numpy as np
from django.conf import settings

from geometry import conformal
from geometry.conformal import ConformalData, ResidualReport
from geometry.curvature import DEFAULT_OUTER_STEP, frame_components, pinch_scan, riemann
from geometry.ellipsoid import EllipsoidSpec, cited_sectional_bounds, sectional_bounds, sectional_range_notes
from geometry.fields import (
    CONDITION_LIMIT,
    DEFAULT_STEP,
    ChartBox,
    ScalarField,
    flat_metric,
    gram_schmidt_frame,
    round_sphere_metric,
    sample_points,
    stereographic_factor,
)
from geometry.immersion import ellipsoid_graph, gauss_residual, induced_metric, sphere_graph
from geometry.management.base import RunRecordCommand
from geometry.records import Table
from geometry.validators import (
    PositiveIntegerValidator,
    PositiveNumberValidator,
    StencilMarginValidator,
    VerifyCaseValidator,
)

logger = logging.getLogger(__name__)

DIM = 4
SPHERE_HALF_WIDTH = 0.5
DEFAULT_POINTS = {'grad': 50, 'hessian': 25, 'curvature': 25, 'gauss': 100, 'pinch': 10}
PINCH_PLANES = 10
GAUSS_TOLERANCE = 1e-5
PINCH_TOLERANCE = 1e-5
ROUND_SECTIONAL_TOLERANCE = 1e-4
ANALYTIC_RANGE_TOLERANCE = 1e-4


def case_half_width(kind, base):
    """Half-width of the chart a case samples from."""
    if base == 'sphere' and kind != 'gauss':
        return SPHERE_HALF_WIDTH
    return ellipsoid_graph(1.0, DIM).chart.upper[0]


def coordinate_field(chart, axis=0):
    dim = chart.dim

    def gradient(x):
        e = np.zeros(dim)
        e[axis] = 1.0
        return e

    return ScalarField(chart, lambda x: float(x[axis]), gradient, lambda x: np.zeros((dim, dim)))


def product_field(chart):
    """F = x_1 x_2."""
    dim = chart.dim

    def gradient(x):
        e = np.zeros(dim)
        e[0], e[1] = x[1], x[0]
        return e

    def hessian(x):
        H = np.zeros((dim, dim))
        H[0, 1] = H[1, 0] = 1.0
        return H

    return ScalarField(chart, lambda x: float(x[0] * x[1]), gradient, hessian)


class Command(RunRecordCommand):
    help = 'Run one residual check (grad/hessian/curvature/gauss/pinch on the sphere or the ellipsoid)'
    command_name = 'verify'
    case_validator = VerifyCaseValidator()

    def add_command_arguments(self, parser):
        parser.add_argument('--case', required=True, help=self.case_validator.get_help_text())
        parser.add_argument('--a', type=float, default=0.8, help='Ellipsoid semi-axis (default 0.8).')
        parser.add_argument('--points', type=int, default=None, help='Sample points (per-case default).')
        parser.add_argument('--step', type=float, default=None, help='Finite-difference step.')
        parser.add_argument('--outer-step', type=float, default=None, dest='outer_step',
                            help='Step used to difference Christoffel symbols.')

    def clean(self, options):
        kind, base = self.case_validator.validate(options['case'])
        step = options['step'] if options['step'] is not None else getattr(settings, 'CONFSTAB_FD_STEP', DEFAULT_STEP)
        outer_step = options['outer_step']
        if outer_step is None:
            outer_step = getattr(settings, 'CONFSTAB_OUTER_STEP', DEFAULT_OUTER_STEP)
        points = options['points'] if options['points'] is not None else DEFAULT_POINTS[kind]
        step = PositiveNumberValidator('step').validate(step)
        outer_step = PositiveNumberValidator('outer-step').validate(outer_step)
        StencilMarginValidator(case_half_width(kind, base)).validate(step, outer_step)
        return {
            'case': f'{kind}:{base}',
            'kind': kind,
            'base': base,
            'a': PositiveNumberValidator('a').validate(options['a']),
            'points': PositiveIntegerValidator('points').validate(points),
            'step': step,
            'outer_step': outer_step,
            'condition_limit': getattr(settings, 'CONFSTAB_CONDITION_LIMIT', CONDITION_LIMIT),
        }

    def run(self, params, seed):
        record_params = {key: value for key, value in params.items() if key not in ('kind', 'base')}
        if params['base'] == 'sphere':
            record_params.pop('a')
        record = self.new_record(record_params, seed)
        getattr(self, f'check_{params["kind"]}')(record, params, seed)
        record.table = Table(
            ['identity_name', 'max_abs_residual', 'points', 'step', 'tolerance', 'pass'],
            [[r.identity_name, r.max_abs_residual, r.points, r.step, r.tolerance, r.passed] for r in record.residuals],
        )
        record.plot = [(index, r.max_abs_residual) for index, r in enumerate(record.residuals)]
        return record

    # ---- geometry for each base ----

    def conformal_data(self, params):
        if params['base'] == 'sphere':
            chart = ChartBox.cube(DIM, SPHERE_HALF_WIDTH)
            return ConformalData(stereographic_factor(chart), flat_metric(chart))
        imm = ellipsoid_graph(params['a'], DIM)
        return ConformalData(conformal.restricted_stereographic_factor(imm), induced_metric(imm, params['step']))

    def sample(self, chart, params, seed):
        return sample_points(chart, params['points'], seed, margin=params['outer_step'] + 2.0 * params['step'])

    def tolerance(self, params, flat_tolerance):
        return flat_tolerance if params['base'] == 'sphere' else conformal.CURVED_BASE_TOLERANCE

    # ---- checks ----

    def check_grad(self, record, params, seed):
        c = self.conformal_data(params)
        points = self.sample(c.chart, params, seed)
        record.residuals.append(conformal.check_grad_law(
            c, coordinate_field(c.chart), points, params['step'], condition_limit=params['condition_limit']))

    def check_hessian(self, record, params, seed):
        c = self.conformal_data(params)
        points = self.sample(c.chart, params, seed)
        record.residuals.append(conformal.check_hessian_law(
            c, product_field(c.chart), points, params['step'],
            tolerance=self.tolerance(params, conformal.HESSIAN_TOLERANCE), condition_limit=params['condition_limit']))

    def check_curvature(self, record, params, seed):
        c = self.conformal_data(params)
        points = self.sample(c.chart, params, seed)
        record.residuals.append(conformal.check_curvature_law(
            c, points, params['step'], params['outer_step'],
            tolerance=self.tolerance(params, conformal.CURVATURE_TOLERANCE), condition_limit=params['condition_limit']))
        if params['base'] != 'sphere':
            return

        # The rescaled flat chart is the round sphere: every frame plane has K = 1
        rescaled = conformal.rescaled_metric(c, params['step'])
        curvatures = []
        for x in points:
            R = riemann(rescaled, x, params['step'], params['outer_step'], condition_limit=params['condition_limit'])
            K = frame_components(R, gram_schmidt_frame(rescaled(x)))
            curvatures += [K[i, j, i, j] for i in range(DIM) for j in range(i + 1, DIM)]
        record.results['rescaled_sectional'] = {'min': min(curvatures), 'max': max(curvatures)}
        record.residuals.append(ResidualReport(
            'round_sphere_sectional', float(max(abs(k - 1.0) for k in curvatures)), len(points),
            params['step'], ROUND_SECTIONAL_TOLERANCE))

    def check_gauss(self, record, params, seed):
        imm = sphere_graph(DIM) if params['base'] == 'sphere' else ellipsoid_graph(params['a'], DIM)
        points = self.sample(imm.chart, params, seed)
        residuals = [gauss_residual(imm, x, params['step'], params['outer_step'],
                                    condition_limit=params['condition_limit'])
                     for x in points]
        record.residuals.append(ResidualReport('gauss_equation', float(max(residuals)), len(residuals),
                                               params['step'], GAUSS_TOLERANCE))

    def check_pinch(self, record, params, seed):
        if params['base'] == 'sphere':
            chart = ChartBox.cube(DIM, SPHERE_HALF_WIDTH)
            report = pinch_scan(round_sphere_metric(chart), chart, params['points'], PINCH_PLANES, seed,
                                params['step'], params['outer_step'], condition_limit=params['condition_limit'])
            record.results['pinch'] = report.as_dict()
            record.residuals.append(ResidualReport(
                'constant_curvature', max(abs(report.K_min - 1.0), abs(report.K_max - 1.0)),
                report.points_sampled, params['step'], PINCH_TOLERANCE))
            return

        spec = EllipsoidSpec(params['a'], DIM)
        imm = ellipsoid_graph(spec.a, DIM)
        report = pinch_scan(induced_metric(imm, params['step']), imm.chart, params['points'], PINCH_PLANES,
                            seed, params['step'], params['outer_step'], condition_limit=params['condition_limit'])
        analytic = sectional_bounds(spec)
        cited = cited_sectional_bounds(spec)
        record.results['pinch'] = report.as_dict()
        record.results['sectional_bounds'] = {'analytic': list(analytic), 'cited': list(cited)}

        outside = max(0.0, analytic[0] - report.K_min, report.K_max - analytic[1])
        record.residuals.append(ResidualReport('analytic_sectional_range', outside, report.points_sampled,
                                               params['step'], ANALYTIC_RANGE_TOLERANCE))
        for note in sectional_range_notes(spec, report.K_min, report.K_max, ANALYTIC_RANGE_TOLERANCE):
            record.warn(note)
