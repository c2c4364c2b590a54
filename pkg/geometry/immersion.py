"""
Graph hypersurfaces x^{n+1} = f(x) in flat space.

The unit normal is normal_sign * (grad f, -1) / w with w = sqrt(1 + |grad f|^2);
with normal_sign = +1 the upper cap of an ellipsoid has positive principal
curvatures. Then

    g_ij = delta_ij + f_i f_j
    h_ij = -normal_sign * f_ij / w
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .curvature import DEFAULT_OUTER_STEP, frame_components, riemann
from .errors import GeometryError
from .fields import CONDITION_LIMIT, DEFAULT_STEP, ChartBox, MetricField, ScalarField, diff1, diff2, gram_schmidt_frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphImmersion:
    f: ScalarField
    normal_sign: int = 1

    def __post_init__(self):
        if self.normal_sign not in (1, -1):
            raise GeometryError(f'normal_sign must be +1 or -1, got {self.normal_sign}',
                                error_code='invalid-normal-sign')

    @property
    def n(self):
        return self.f.chart.dim

    @property
    def chart(self):
        return self.f.chart

    def flipped(self):
        return GraphImmersion(self.f, -self.normal_sign)


@dataclass(frozen=True, eq=False)
class FundamentalForms:
    """Induced metric, second fundamental form and their invariants at one point."""

    g: np.ndarray
    g_inv: np.ndarray
    h: np.ndarray
    w: float
    meanH: float
    normSqH: float
    gradient: np.ndarray

    @property
    def n(self):
        return self.g.shape[0]


def fundamental_forms(imm, x, step=DEFAULT_STEP, analytic=True):
    """
    First and second fundamental forms of the graph at ``x``.

    g^{-1} comes from the Sherman-Morrison identity
    g^{-1} = I - grad f grad f^T / w^2, which never fails for a graph.
    """
    gradient = diff1(imm.f, x, step, analytic)
    hessian = diff2(imm.f, x, step, analytic)
    n = imm.n
    w = math.sqrt(1.0 + gradient @ gradient)
    g = np.eye(n) + np.outer(gradient, gradient)
    g_inv = np.eye(n) - np.outer(gradient, gradient) / w**2
    h = -imm.normal_sign * hessian / w
    shape = g_inv @ h
    return FundamentalForms(
        g=g,
        g_inv=g_inv,
        h=h,
        w=w,
        meanH=float(np.trace(shape)) / n,
        normSqH=float(np.trace(shape @ shape)),
        gradient=gradient,
    )


def principal_curvatures(forms):
    """Eigenvalues of g^{-1} h in ascending order."""
    return linalg.eigh(forms.h, forms.g, eigvals_only=True)


def h_frame(forms):
    """Second fundamental form in the Gram-Schmidt g-orthonormal frame."""
    E = gram_schmidt_frame(forms.g)
    return E.T @ forms.h @ E


def induced_metric(imm, step=DEFAULT_STEP):
    """
    The metric g = I + grad f grad f^T as a MetricField.

    When f has analytic gradient and Hessian rules the metric jet is
    analytic too: d_k g_ij = f_ik f_j + f_i f_jk.
    """
    f = imm.f
    n = imm.n

    def rule(x):
        gradient = diff1(f, x, step)
        return np.eye(n) + np.outer(gradient, gradient)

    jet = None
    if f.gradient_rule is not None and f.hessian_rule is not None:
        def jet(x):
            gradient = np.asarray(f.gradient_rule(x), dtype=float)
            hessian = np.asarray(f.hessian_rule(x), dtype=float)
            return np.einsum('ik,j->kij', hessian, gradient) + np.einsum('i,jk->kij', gradient, hessian)

    return MetricField(f.chart, rule, jet)


def gauss_residual(imm, x, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP, analytic=True,
                   condition_limit=CONDITION_LIMIT):
    """
    Largest |R_ijkl - (h_ik h_jl - h_il h_jk)| in the g-orthonormal frame.

    The intrinsic side is the finite-difference Riemann tensor of the
    induced metric; the extrinsic side uses the second fundamental form.
    """
    x = np.asarray(x, dtype=float)
    forms = fundamental_forms(imm, x, step, analytic)
    R = riemann(induced_metric(imm, step), x, step, outer_step, analytic, condition_limit)
    E = gram_schmidt_frame(forms.g)
    intrinsic = frame_components(R, E)
    hf = E.T @ forms.h @ E
    extrinsic = np.einsum('ik,jl->ijkl', hf, hf) - np.einsum('il,jk->ijkl', hf, hf)
    residual = float(np.max(np.abs(intrinsic - extrinsic)))
    logger.debug(f'Gauss residual at {x.tolist()}: {residual:.3e}')
    return residual


def ellipsoid_graph(a, n, chart=None, normal_sign=1):
    """
    Upper cap f = a sqrt(1 - |x|^2) of the ellipsoid |x|^2 + y^2/a^2 = 1.

    The default chart is the cube of half-width 0.8/sqrt(n), whose corners
    stay inside the unit ball.
    """
    if a <= 0.0:
        raise GeometryError(f'Semi-axis must be positive, got {a}', error_code='invalid-semi-axis')
    if chart is None:
        chart = ChartBox.cube(n, 0.8 / math.sqrt(n))

    def height(x):
        return a * math.sqrt(1.0 - x @ x)

    def gradient(x):
        return -a**2 * x / height(x)

    def hessian(x):
        grad = gradient(x)
        return -(a**2 * np.eye(n) + np.outer(grad, grad)) / height(x)

    return GraphImmersion(ScalarField(chart, height, gradient, hessian), normal_sign)


def sphere_graph(n, chart=None, normal_sign=1):
    return ellipsoid_graph(1.0, n, chart, normal_sign)
