"""
=============================================================================
CONFORMAL RESCALING AND ITS TRANSFORMATION LAWS
=============================================================================

For g_hat = e^{2u} g and a g-orthonormal frame E, the frame E_hat = e^{-u} E
is g_hat-orthonormal. In those frames:

    gradient:     F_hat_A = e^{-u} F_A
    Hessian:      e^{2u} F_hat_AB = F_AB + sum_C u_C F_C delta_AB - F_A u_B - F_B u_A
    curvature:    e^{2u} R_hat_ABCD = R_ABCD - (u_AB) o delta + (u_A u_B) o delta
                                      - |grad u|^2 (delta_AC delta_BD - delta_AD delta_BC)
    second form:  h_hat = e^{-u} (h - u_N Id)

where "o" is the Kulkarni-Nomizu product and every right-hand derivative is
taken with respect to g. Each check_* function evaluates both sides
independently (the left side from the rescaled metric's own Christoffel
symbols and Riemann tensor) and reports the largest residual.

=============================================================================
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .curvature import DEFAULT_OUTER_STEP, christoffel, frame_components, riemann
from .errors import GeometryError
from .fields import CONDITION_LIMIT, DEFAULT_STEP, MetricField, ScalarField, diff1, diff2, gram_schmidt_frame

logger = logging.getLogger(__name__)

GRAD_TOLERANCE = 1e-6
HESSIAN_TOLERANCE = 1e-5
CURVATURE_TOLERANCE = 1e-5
CURVED_BASE_TOLERANCE = 1e-4


@dataclass(frozen=True)
class ConformalData:
    u: ScalarField
    base_metric: MetricField

    def __post_init__(self):
        if self.u.chart.dim != self.base_metric.chart.dim:
            raise GeometryError(
                f'Conformal factor lives on a {self.u.chart.dim}-dim chart, metric on {self.base_metric.chart.dim}',
                error_code='chart-mismatch',
            )

    @property
    def chart(self):
        return self.base_metric.chart


@dataclass(frozen=True)
class ResidualReport:
    identity_name: str
    max_abs_residual: float
    points: int
    step: float
    tolerance: float

    @property
    def passed(self):
        # NaN never passes
        return bool(self.max_abs_residual <= self.tolerance)

    def as_dict(self):
        return {
            'identity_name': self.identity_name,
            'max_abs_residual': self.max_abs_residual,
            'points': self.points,
            'step': self.step,
            'tolerance': self.tolerance,
            'pass': self.passed,
        }


def _report(name, residuals, step, tolerance):
    worst = max(residuals) if residuals else 0.0
    report = ResidualReport(name, float(worst), len(residuals), float(step), float(tolerance))
    logger.info(f'{name}: max residual {report.max_abs_residual:.3e} over {report.points} points '
                f'(tolerance {tolerance:g}, {"pass" if report.passed else "FAIL"})')
    return report


def rescaled_metric(c, step=DEFAULT_STEP):
    """
    The metric e^{2u} g.

    When g has a jet the rescaled metric gets one by the product rule,
    d_k(e^{2u} g_ij) = e^{2u} (2 u_k g_ij + d_k g_ij), with u_k from diff1.
    """
    u, g = c.u, c.base_metric

    def rule(x):
        return math.exp(2.0 * u(x)) * g(x)

    jet = None
    if g.jet_rule is not None:
        def jet(x):
            du = diff1(u, x, step)
            return math.exp(2.0 * u(x)) * (2.0 * np.einsum('k,ij->kij', du, g(x)) + np.asarray(g.jet_rule(x)))

    return MetricField(g.chart, rule, jet)


def restricted_stereographic_factor(imm):
    """
    u = ln(2 / (1 + |x|^2 + f(x)^2)), the stereographic factor of the ambient
    space pulled back to the graph of ``imm.f``.

    Needs analytic gradient and Hessian rules on f.
    """
    f = imm.f
    if f.gradient_rule is None or f.hessian_rule is None:
        raise GeometryError('The restricted stereographic factor needs analytic derivatives of f',
                            error_code='missing-analytic-rule')

    def parts(x):
        value = f(x)
        grad = np.asarray(f.gradient_rule(x), dtype=float)
        s = 1.0 + x @ x + value**2
        s_i = 2.0 * x + 2.0 * value * grad
        return value, grad, s, s_i

    def rule(x):
        return math.log(2.0) - math.log(parts(x)[2])

    def gradient(x):
        _, _, s, s_i = parts(x)
        return -s_i / s

    def hessian(x):
        value, grad, s, s_i = parts(x)
        s_ij = 2.0 * np.eye(len(x)) + 2.0 * np.outer(grad, grad) + 2.0 * value * np.asarray(f.hessian_rule(x))
        return -s_ij / s + np.outer(s_i, s_i) / s**2

    return ScalarField(f.chart, rule, gradient, hessian)


def _covariant_hessian(F, metric, x, step, analytic, condition_limit=CONDITION_LIMIT):
    """Hess F_ij = d_ij F - G^k_ij d_k F for the Levi-Civita connection of ``metric``."""
    gamma = christoffel(metric, x, step, analytic, condition_limit)
    return diff2(F, x, step, analytic) - np.einsum('kij,k->ij', gamma, diff1(F, x, step, analytic))


def check_grad_law(c, F, points, step=DEFAULT_STEP, tolerance=GRAD_TOLERANCE, analytic=True,
                   condition_limit=CONDITION_LIMIT):
    """Residual of |grad F|^2_{g_hat} = e^{-2u} |grad F|^2_g at each point."""
    rescaled = rescaled_metric(c, step)
    residuals = []
    for x in np.atleast_2d(points):
        dF = diff1(F, x, step, analytic)
        lhs = dF @ rescaled.inverse(x, condition_limit) @ dF
        rhs = math.exp(-2.0 * c.u(x)) * (dF @ c.base_metric.inverse(x, condition_limit) @ dF)
        residuals.append(abs(lhs - rhs))
    return _report('grad_law', residuals, step, tolerance)


def check_hessian_law(c, F, points, step=DEFAULT_STEP, tolerance=HESSIAN_TOLERANCE, analytic=True,
                      condition_limit=CONDITION_LIMIT):
    """Componentwise residual of the Hessian law in the frames E and e^{-u} E."""
    rescaled = rescaled_metric(c, step)
    residuals = []
    for x in np.atleast_2d(points):
        E = gram_schmidt_frame(c.base_metric(x))
        e_u = math.exp(c.u(x))
        E_hat = E / e_u

        lhs = e_u**2 * (E_hat.T @ _covariant_hessian(F, rescaled, x, step, analytic, condition_limit) @ E_hat)

        F_A = E.T @ diff1(F, x, step, analytic)
        u_A = E.T @ diff1(c.u, x, step, analytic)
        F_AB = E.T @ _covariant_hessian(F, c.base_metric, x, step, analytic, condition_limit) @ E
        rhs = F_AB + (u_A @ F_A) * np.eye(len(x)) - np.outer(F_A, u_A) - np.outer(u_A, F_A)
        residuals.append(float(np.max(np.abs(lhs - rhs))))
    return _report('hessian_law', residuals, step, tolerance)


def kulkarni_nomizu(h, k):
    """(h o k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad."""
    return (np.einsum('ac,bd->abcd', h, k) + np.einsum('bd,ac->abcd', h, k)
            - np.einsum('ad,bc->abcd', h, k) - np.einsum('bc,ad->abcd', h, k))


def _curvature_law_sides(c, x, step, outer_step, analytic, condition_limit=CONDITION_LIMIT):
    """Both sides of the curvature law at ``x`` plus the frame data they were built from."""
    dim = len(x)
    E = gram_schmidt_frame(c.base_metric(x))
    e_u = math.exp(c.u(x))

    R_hat = riemann(rescaled_metric(c, step), x, step, outer_step, analytic, condition_limit)
    lhs = e_u**2 * frame_components(R_hat, E / e_u)

    R = frame_components(riemann(c.base_metric, x, step, outer_step, analytic, condition_limit), E)
    u_A = E.T @ diff1(c.u, x, step, analytic)
    u_AB = E.T @ _covariant_hessian(c.u, c.base_metric, x, step, analytic, condition_limit) @ E
    grad_sq = float(u_A @ u_A)
    identity = np.eye(dim)
    rhs = (R - kulkarni_nomizu(u_AB, identity) + kulkarni_nomizu(np.outer(u_A, u_A), identity)
           - 0.5 * grad_sq * kulkarni_nomizu(identity, identity))
    return lhs, rhs, R, u_A, u_AB, grad_sq


def check_curvature_law(c, points, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP,
                        tolerance=CURVATURE_TOLERANCE, analytic=True, condition_limit=CONDITION_LIMIT):
    """Componentwise residual of the curvature law over ``points``."""
    residuals = []
    for x in np.atleast_2d(points):
        lhs, rhs, *_ = _curvature_law_sides(c, np.asarray(x, dtype=float), step, outer_step, analytic,
                                            condition_limit)
        residuals.append(float(np.max(np.abs(lhs - rhs))))
    return _report('curvature_law', residuals, step, tolerance)


def check_summed_laws(c, points, split, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP,
                      tolerance=None, analytic=True, condition_limit=CONDITION_LIMIT):
    """
    Summed sectional identities for a split of the frame into ``split``
    tangent directions followed by the remaining normal ones.

    For A != B the curvature law gives
        e^{2u} R_hat_ABAB = R_ABAB - (u_AA + u_BB) + (u_A^2 + u_B^2) - |grad u|^2
    which is summed over tangent-normal pairs, ordered normal-normal pairs
    and ordered tangent-tangent pairs. The default tolerance is dim^2 times
    the componentwise one.

    Returns:
        list of three ResidualReports
    """
    dim = c.chart.dim
    if not 1 <= split < dim:
        raise GeometryError(f'Split must leave both blocks non-empty, got {split} of {dim}',
                            error_code='invalid-split')
    if tolerance is None:
        tolerance = dim**2 * CURVATURE_TOLERANCE

    tangent = range(split)
    normal = range(split, dim)
    blocks = {
        'tangent_normal_sum': [(i, a) for i in tangent for a in normal],
        'normal_normal_sum': [(a, b) for a in normal for b in normal if a != b],
        'tangent_tangent_sum': [(i, j) for i in tangent for j in tangent if i != j],
    }
    residuals = {name: [] for name in blocks}
    for x in np.atleast_2d(points):
        lhs, _, R, u_A, u_AB, grad_sq = _curvature_law_sides(c, np.asarray(x, dtype=float), step, outer_step,
                                                             analytic, condition_limit)
        for name, pairs in blocks.items():
            left = math.fsum(lhs[A, B, A, B] for A, B in pairs)
            right = math.fsum(R[A, B, A, B] - (u_AB[A, A] + u_AB[B, B]) + (u_A[A]**2 + u_A[B]**2) - grad_sq
                              for A, B in pairs)
            residuals[name].append(abs(left - right))
    return [_report(name, values, step, tolerance) for name, values in residuals.items()]


def transform_second_form(h, meanH, u_normal, u_value):
    """
    Second fundamental form and mean curvature after rescaling by e^{2u}.

    ``h`` is given in a g-orthonormal frame and the result in the matching
    g_hat-orthonormal frame. Leading axes broadcast, so stacks of shape
    (..., n, n) with scalars of shape (...) are evaluated in one call.

    Returns:
        (h_tilde, H_tilde)
    """
    h = np.asarray(h, dtype=float)
    scale = np.exp(-np.asarray(u_value, dtype=float))
    u_normal = np.asarray(u_normal, dtype=float)
    identity = np.eye(h.shape[-1])
    h_tilde = scale[..., None, None] * (h - u_normal[..., None, None] * identity)
    H_tilde = scale * (np.asarray(meanH, dtype=float) - u_normal)
    return h_tilde, H_tilde


def second_form_norm_sq(h_tilde):
    """|h|^2 in an orthonormal frame: the sum of squared components."""
    return np.sum(np.square(h_tilde), axis=(-2, -1))


def minimal_mean_curvature(u_normal, u_value):
    """Mean curvature after rescaling a minimal submanifold: -e^{-u} u_N."""
    return -math.exp(-u_value) * u_normal
