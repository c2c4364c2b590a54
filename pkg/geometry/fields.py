"""
=============================================================================
COORDINATE CHARTS, FIELDS AND FINITE DIFFERENCES
=============================================================================

Scalar and metric fields are pure evaluation rules over a coordinate box.
Derivatives come from an analytic rule when the field carries one and from
central differences otherwise; finite differences are then only used to
verify the analytic rule (pass ``analytic=False``).

Every stencil needs an interior margin of twice its widest step. Points that
violate it raise instead of being clamped.

CONTENTS:
- ChartBox: axis-aligned coordinate box with a sampling grid
- ScalarField / MetricField: immutable evaluation rules
- diff1 / diff2 / richardson_diff: gradient, Hessian, extrapolated gradient
- gram_schmidt_frame: g-orthonormal frame in fixed axis order
- sample_points: seeded interior points
- flat_metric / stereographic_factor / round_sphere_metric: stock fields

=============================================================================
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import GeometryError, MetricSingular, PointOutsideChart, StepTooLarge

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-4
DEFAULT_RICHARDSON_STEP = 1e-2
CONDITION_LIMIT = 1e10


@dataclass(frozen=True)
class ChartBox:
    """Axis-aligned box ``lower[k] < x[k] < upper[k]`` with a sampling resolution per axis."""

    lower: tuple
    upper: tuple
    resolution: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        resolution = tuple(int(v) for v in self.resolution)
        if not lower or not (len(lower) == len(upper) == len(resolution)):
            raise GeometryError(
                'Chart bounds and resolution must be non-empty and of equal length',
                error_code='invalid-chart',
                details={'lower': lower, 'upper': upper, 'resolution': resolution},
            )
        for k, (lo, hi, res) in enumerate(zip(lower, upper, resolution)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise GeometryError(f'Axis {k}: need finite lower < upper, got [{lo}, {hi}]',
                                    error_code='invalid-chart')
            if res < 2:
                raise GeometryError(f'Axis {k}: resolution must be >= 2, got {res}',
                                    error_code='invalid-chart')
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'resolution', resolution)

    @classmethod
    def cube(cls, dim, half_width, resolution=11):
        """Centered cube ``(-half_width, half_width)^dim``."""
        return cls((-half_width,) * dim, (half_width,) * dim, (resolution,) * dim)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def point_count(self):
        return math.prod(self.resolution)

    def margin(self, x):
        """Smallest distance from ``x`` to a face of the box (negative outside)."""
        x = np.asarray(x, dtype=float)
        return float(min(np.min(x - np.array(self.lower)), np.min(np.array(self.upper) - x)))

    def require_interior(self, x, margin=0.0):
        """
        Check that ``x`` lies in the open box with at least ``margin`` to spare.

        Raises:
            PointOutsideChart: wrong length or not strictly inside the box
            StepTooLarge: inside the box but closer than ``margin`` to a face
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise PointOutsideChart(f'Expected a point of dimension {self.dim}, got shape {x.shape}',
                                    details={'point': x.tolist()})
        distance = self.margin(x)
        if distance <= 0.0:
            raise PointOutsideChart(f'Point {x.tolist()} is outside the chart',
                                    details={'point': x.tolist(), 'lower': self.lower, 'upper': self.upper})
        if distance < margin:
            raise StepTooLarge(
                f'Point {x.tolist()} is {distance:.3g} from the chart edge; the stencil needs {margin:.3g}',
                details={'point': x.tolist(), 'margin': distance, 'required': margin},
            )
        return x

    def grid_points(self):
        """All grid points, shape ``(point_count, dim)``, last axis varying fastest."""
        axes = [np.linspace(lo, hi, res) for lo, hi, res in zip(self.lower, self.upper, self.resolution)]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class ScalarField:
    """
    Pure real-valued rule on a chart.

    ``gradient_rule`` and ``hessian_rule`` are optional analytic derivatives;
    when present they take precedence over finite differences.
    """

    chart: ChartBox
    rule: Callable
    gradient_rule: Optional[Callable] = None
    hessian_rule: Optional[Callable] = None

    def __call__(self, x):
        return float(self.rule(np.asarray(x, dtype=float)))

    def __add__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        gradient_rule = hessian_rule = None
        if self.gradient_rule and other.gradient_rule:
            gradient_rule = lambda x: np.asarray(self.gradient_rule(x)) + np.asarray(other.gradient_rule(x))
        if self.hessian_rule and other.hessian_rule:
            hessian_rule = lambda x: np.asarray(self.hessian_rule(x)) + np.asarray(other.hessian_rule(x))
        return ScalarField(self.chart, lambda x: self.rule(x) + other.rule(x), gradient_rule, hessian_rule)


@dataclass(frozen=True)
class MetricField:
    """
    Symmetric positive-definite matrix rule on a chart.

    ``jet_rule`` optionally returns the analytic first derivatives as an array
    ``[k, i, j] = d_k g_ij``.
    """

    chart: ChartBox
    rule: Callable
    jet_rule: Optional[Callable] = None

    def __call__(self, x):
        g = np.asarray(self.rule(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (g + g.T)

    def inverse(self, x, condition_limit=CONDITION_LIMIT):
        """Inverse metric at ``x``; raises MetricSingular above ``condition_limit``."""
        g = self(x)
        condition = np.linalg.cond(g)
        if not np.isfinite(condition) or condition > condition_limit:
            raise MetricSingular(
                f'Metric condition number {condition:.3g} exceeds {condition_limit:.3g}',
                details={'point': np.asarray(x, dtype=float).tolist(), 'condition': float(condition)},
            )
        g_inv = np.linalg.inv(g)
        return 0.5 * (g_inv + g_inv.T)

    def derivative(self, x, step=DEFAULT_STEP, analytic=True):
        """First derivatives ``[k, i, j] = d_k g_ij`` at ``x``."""
        x = self.chart.require_interior(x, 2.0 * step if not (analytic and self.jet_rule) else 0.0)
        if analytic and self.jet_rule is not None:
            jet = np.asarray(self.jet_rule(x), dtype=float)
        else:
            jet = np.stack([_central(self, x, k, step) for k in range(self.chart.dim)])
        return 0.5 * (jet + np.swapaxes(jet, 1, 2))


def _central(func, x, axis, step):
    """Central difference of ``func`` along ``axis``; works for scalar and array valued rules."""
    offset = np.zeros_like(x)
    offset[axis] = step
    return (np.asarray(func(x + offset)) - np.asarray(func(x - offset))) / (2.0 * step)


def _check_step(step):
    if not (step > 0.0 and math.isfinite(step)):
        raise GeometryError(f'Finite-difference step must be positive, got {step}', error_code='invalid-step')


def diff1(field, x, step=DEFAULT_STEP, analytic=True):
    """
    Gradient of a scalar field by central differences.

    Args:
        field: ScalarField
        x: interior point with margin >= 2*step
        step: difference step h
        analytic: use the field's gradient rule when it has one

    Returns:
        numpy array of partial derivatives in axis order
    """
    _check_step(step)
    x = field.chart.require_interior(x, 2.0 * step)
    if analytic and field.gradient_rule is not None:
        return np.asarray(field.gradient_rule(x), dtype=float)
    return np.array([_central(field, x, k, step) for k in range(field.chart.dim)], dtype=float)


def diff2(field, x, step=DEFAULT_STEP, analytic=True):
    """
    Hessian of a scalar field by central differences, symmetrized as (H + H^T)/2.

    Diagonal entries use the three-point second difference, mixed entries the
    four-corner stencil; both are exact on quadratics up to rounding.
    """
    _check_step(step)
    x = field.chart.require_interior(x, 2.0 * step)
    if analytic and field.hessian_rule is not None:
        hessian = np.asarray(field.hessian_rule(x), dtype=float)
        return 0.5 * (hessian + hessian.T)

    dim = field.chart.dim
    basis = np.eye(dim) * step
    center = field(x)
    hessian = np.zeros((dim, dim))
    for i in range(dim):
        hessian[i, i] = (field(x + basis[i]) - 2.0 * center + field(x - basis[i])) / step**2
        for j in range(i + 1, dim):
            corners = (field(x + basis[i] + basis[j]) - field(x + basis[i] - basis[j])
                       - field(x - basis[i] + basis[j]) + field(x - basis[i] - basis[j]))
            hessian[i, j] = hessian[j, i] = corners / (4.0 * step**2)
    return 0.5 * (hessian + hessian.T)


def richardson_diff(field, x, step=DEFAULT_RICHARDSON_STEP):
    """
    Richardson-extrapolated gradient with an error estimate.

    The central differences at h, h/2 and h/4 give two fourth-order
    extrapolations; the finer one is returned and the largest difference
    between the two is the error estimate. The estimate vanishes (up to
    rounding) on polynomials of degree <= 4.

    Returns:
        (gradient, error_estimate)
    """
    _check_step(step)
    x = field.chart.require_interior(x, 2.0 * step)
    raw = [np.array([_central(field, x, k, h) for k in range(field.chart.dim)])
           for h in (step, step / 2.0, step / 4.0)]
    coarse = (4.0 * raw[1] - raw[0]) / 3.0
    fine = (4.0 * raw[2] - raw[1]) / 3.0
    error_estimate = float(np.max(np.abs(fine - coarse)))
    logger.debug(f'Richardson gradient at {x.tolist()}: error estimate {error_estimate:.3e}')
    return fine, error_estimate


def gram_schmidt_frame(g):
    """
    g-orthonormal frame obtained by Gram-Schmidt on the coordinate basis.

    Columns are the frame vectors, so ``E.T @ g @ E = I``. The result is the
    inverse transpose of the Cholesky factor, which is what Gram-Schmidt in
    axis order produces. Works on stacked metrics ``(..., n, n)``.
    """
    lower = np.linalg.cholesky(np.asarray(g, dtype=float))
    return np.swapaxes(np.linalg.inv(lower), -1, -2)


def sample_points(chart, count, seed, margin=0.0):
    """``count`` seeded uniform points at least ``margin`` inside ``chart``."""
    lower = np.array(chart.lower) + margin
    upper = np.array(chart.upper) - margin
    if np.any(lower >= upper):
        raise StepTooLarge(f'Margin {margin} leaves no interior in the chart', details={'margin': margin})
    rng = np.random.default_rng(seed)
    return lower + (upper - lower) * rng.random((count, chart.dim))


def flat_metric(chart):
    dim = chart.dim
    return MetricField(chart, lambda x: np.eye(dim), lambda x: np.zeros((dim, dim, dim)))


def stereographic_factor(chart):
    """u = ln(2 / (1 + |x|^2)), the stereographic conformal factor, with analytic derivatives."""
    dim = chart.dim

    def gradient(x):
        return -2.0 * x / (1.0 + x @ x)

    def hessian(x):
        s = 1.0 + x @ x
        return -2.0 * np.eye(dim) / s + 4.0 * np.outer(x, x) / s**2

    return ScalarField(chart, lambda x: math.log(2.0 / (1.0 + x @ x)), gradient, hessian)


def round_sphere_metric(chart):
    """Stereographic round metric 4/(1 + |x|^2)^2 times the identity; curvature 1."""
    dim = chart.dim

    def jet(x):
        s = 1.0 + x @ x
        return np.einsum('k,ij->kij', -16.0 * x / s**3, np.eye(dim))

    return MetricField(chart, lambda x: 4.0 / (1.0 + x @ x) ** 2 * np.eye(dim), jet)
