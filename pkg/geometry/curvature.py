"""
=============================================================================
CHRISTOFFEL SYMBOLS, RIEMANN TENSOR AND SECTIONAL CURVATURE
=============================================================================

Conventions:
    R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z
    R^a_bcd  = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
    R_abcd   = g_ae R^e_bcd
so that the sectional curvature of span{X, Y} is R(X, Y, X, Y) / |X ^ Y|^2
and the unit sphere has R_ABAB = +1 in any orthonormal frame.

The Christoffel symbols come from the metric jet (analytic when the metric
carries one, central differences otherwise). Their derivatives are taken by
a Richardson-combined central difference with outer step H, so a point needs
a margin of H + 2*step to the chart boundary.

=============================================================================
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpan, GeometryError
from .fields import CONDITION_LIMIT, DEFAULT_STEP, gram_schmidt_frame, sample_points

logger = logging.getLogger(__name__)

DEFAULT_OUTER_STEP = 1e-3
DEGENERATE_SPAN = 1e-12


@dataclass(frozen=True, eq=False)
class Riemann4:
    """Lowered curvature tensor ``R_ABCD`` at ``basepoint``."""

    components: np.ndarray
    basepoint: tuple
    symmetrization_defect: float = 0.0

    @property
    def dim(self):
        return self.components.shape[0]


@dataclass(frozen=True)
class PinchReport:
    K_min: float
    K_max: float
    delta: float
    planes_sampled: int
    seed: int
    points_sampled: int = 0
    # (point, plane) where each extremum was observed
    argmin: dict = field(default_factory=dict)
    argmax: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            'K_min': self.K_min,
            'K_max': self.K_max,
            'delta': self.delta,
            'planes_sampled': self.planes_sampled,
            'points_sampled': self.points_sampled,
            'seed': self.seed,
        }


def christoffel(metric, x, step=DEFAULT_STEP, analytic=True, condition_limit=CONDITION_LIMIT):
    """
    Levi-Civita connection coefficients ``G[a, b, c] = G^a_bc`` at ``x``.

    Raises:
        MetricSingular: metric condition number above ``condition_limit``
        PointOutsideChart / StepTooLarge: from the metric derivative
    """
    g_inv = metric.inverse(x, condition_limit)
    dg = metric.derivative(x, step, analytic)
    # lowered[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    lowered = np.einsum('bdc->dbc', dg) + np.einsum('cdb->dbc', dg) - dg
    gamma = 0.5 * np.einsum('ad,dbc->abc', g_inv, lowered)
    return 0.5 * (gamma + np.swapaxes(gamma, 1, 2))


def _christoffel_derivative(metric, x, step, outer_step, analytic, condition_limit):
    """``dG[e, a, b, c] = d_e G^a_bc`` with the Richardson combination of outer steps H and H/2."""
    dim = metric.chart.dim

    def central(h):
        rows = []
        for e in range(dim):
            offset = np.zeros(dim)
            offset[e] = h
            plus = christoffel(metric, x + offset, step, analytic, condition_limit)
            minus = christoffel(metric, x - offset, step, analytic, condition_limit)
            rows.append((plus - minus) / (2.0 * h))
        return np.stack(rows)

    return (4.0 * central(outer_step / 2.0) - central(outer_step)) / 3.0


def _project_algebraic(R):
    """Nearest tensor with the pair antisymmetries, pair symmetry and first Bianchi identity."""
    R = 0.5 * (R - np.einsum('bacd->abcd', R))
    R = 0.5 * (R - np.einsum('abdc->abcd', R))
    R = 0.5 * (R + np.einsum('cdab->abcd', R))
    # With the symmetries above the cyclic sum is totally antisymmetric
    cyclic = R + np.einsum('acdb->abcd', R) + np.einsum('adbc->abcd', R)
    return R - cyclic / 3.0


def riemann(metric, x, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP, analytic=True,
            condition_limit=CONDITION_LIMIT):
    """
    Lowered Riemann tensor of ``metric`` at ``x``.

    The raw finite-difference tensor is projected onto the algebraic curvature
    symmetries; the size of that correction is kept as
    ``symmetrization_defect``.
    """
    x = np.asarray(x, dtype=float)
    metric.chart.require_interior(x, outer_step + 2.0 * step)
    gamma = christoffel(metric, x, step, analytic, condition_limit)
    dgamma = _christoffel_derivative(metric, x, step, outer_step, analytic, condition_limit)

    raised = (np.einsum('cadb->abcd', dgamma) - np.einsum('dacb->abcd', dgamma)
              + np.einsum('ace,edb->abcd', gamma, gamma) - np.einsum('ade,ecb->abcd', gamma, gamma))
    raw = np.einsum('ae,ebcd->abcd', metric(x), raised)
    components = _project_algebraic(raw)
    defect = float(np.max(np.abs(components - raw)))
    logger.debug(f'Riemann tensor at {x.tolist()}: symmetrization defect {defect:.3e}')
    return Riemann4(components=components, basepoint=tuple(x.tolist()), symmetrization_defect=defect)


def riemann_symmetry_residual(R):
    """
    Largest violation of R_ABCD = -R_BACD = -R_ABDC = R_CDAB.

    Tensors built by riemann are projected onto these symmetries, so this is
    zero up to rounding for them; their symmetrization_defect measures how far
    the raw finite-difference tensor was from the symmetric one.
    """
    c = R.components
    return float(max(
        np.max(np.abs(c + np.einsum('bacd->abcd', c))),
        np.max(np.abs(c + np.einsum('abdc->abcd', c))),
        np.max(np.abs(c - np.einsum('cdab->abcd', c))),
    ))


def bianchi_residual(R):
    """
    Largest entry of R_ABCD + R_ACDB + R_ADBC.

    Zero up to rounding for riemann output (see riemann_symmetry_residual).
    """
    c = R.components
    return float(np.max(np.abs(c + np.einsum('acdb->abcd', c) + np.einsum('adbc->abcd', c))))


def frame_components(R, frame):
    """Components of ``R`` in the frame whose columns are ``frame``."""
    E = np.asarray(frame, dtype=float)
    return np.einsum('abcd,aA,bB,cC,dD->ABCD', R.components, E, E, E, E)


def sectional(R, g, span):
    """
    Sectional curvature of the plane spanned by ``span = (X, Y)``.

    Raises:
        DegenerateSpan: |X ^ Y|^2 below 1e-12
    """
    X, Y = (np.asarray(v, dtype=float) for v in span)
    g = np.asarray(g, dtype=float)
    area_sq = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if area_sq < DEGENERATE_SPAN:
        raise DegenerateSpan(f'Span is degenerate: |X ^ Y|^2 = {area_sq:.3e}',
                             details={'X': X.tolist(), 'Y': Y.tolist()})
    return float(np.einsum('abcd,a,b,c,d->', R.components, X, Y, X, Y) / area_sq)


def _orthonormalize(X, Y, g):
    X = X / math.sqrt(X @ g @ X)
    Y = Y - (X @ g @ Y) * X
    return X, Y / math.sqrt(Y @ g @ Y)


def pinch_scan(metric, chart, n_points, n_planes, seed, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP,
               analytic=True, condition_limit=CONDITION_LIMIT):
    """
    Extremal sectional curvatures over seeded points and planes.

    At every point the coordinate planes of the g-orthonormal frame are
    always included, followed by ``n_planes`` random planes (pairs of
    standard normals orthonormalized under g). Points and planes use
    independent streams spawned from ``seed``.
    """
    if n_points < 1 or n_planes < 1:
        raise GeometryError(f'pinch_scan needs n_points, n_planes >= 1, got {n_points}, {n_planes}',
                            error_code='invalid-argument')

    point_stream, plane_stream = np.random.SeedSequence(seed).spawn(2)
    points = sample_points(chart, n_points, point_stream, margin=outer_step + 2.0 * step)
    rng = np.random.default_rng(plane_stream)

    K_min, K_max = math.inf, -math.inf
    argmin, argmax = {}, {}
    planes = 0
    for x in points:
        R = riemann(metric, x, step, outer_step, analytic, condition_limit)
        g = metric(x)
        frame = gram_schmidt_frame(g)
        spans = [(frame[:, i], frame[:, j]) for i in range(chart.dim) for j in range(i + 1, chart.dim)]
        spans += [_orthonormalize(rng.standard_normal(chart.dim), rng.standard_normal(chart.dim), g)
                  for _ in range(n_planes)]
        for X, Y in spans:
            K = sectional(R, g, (X, Y))
            planes += 1
            if K < K_min:
                K_min, argmin = K, {'point': x.tolist(), 'plane': [X.tolist(), Y.tolist()]}
            if K > K_max:
                K_max, argmax = K, {'point': x.tolist(), 'plane': [X.tolist(), Y.tolist()]}

    delta = K_min / K_max if K_max > 0.0 else math.nan
    logger.info(f'Pinch scan over {n_points} points, {planes} planes: '
                f'K in [{K_min:.6g}, {K_max:.6g}], delta {delta:.6g}')
    return PinchReport(K_min=K_min, K_max=K_max, delta=delta, planes_sampled=planes, seed=int(seed),
                       points_sampled=n_points, argmin=argmin, argmax=argmax)
