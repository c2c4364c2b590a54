"""
=============================================================================
THE ELLIPSOID |x|^2 + y^2/a^2 = 1 UNDER STEREOGRAPHIC RESCALING
=============================================================================

Only the upper cap y = f(x) = a sqrt(1 - |x|^2) is computed; the lower cap
is its mirror image. Everything rotationally symmetric is parametrized by
t = y^2 in [0, a^2]: t = 0 is the equator (where the graph chart
degenerates) and t = a^2 the tip.

The conformal second fundamental form |h_tilde|^2 is always computed by
pushing the frame components of h through transform_second_form. The
rational closed form

    |h_tilde|^2 = (a^2 - 1)^2 / 4 * G_n(t)

and the cited piecewise maximum are compared against it, never used in its
place. Disagreements are reported as warnings, not errors.

CONTENTS:
- EllipsoidSpec / EllipsoidPointData / point_data
- g_poly / htilde_profile / closed_vs_oracle
- max_conf_ii / conformal_invariant_bound
- admissible_range / range_reconciliation
- principal_curvatures / sectional_bounds / cited_sectional_bounds
- grid_sectional_range / sectional_range_notes
- pinching_delta / pinching_interval / condensed_display_gap

=============================================================================
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from .conformal import ResidualReport, second_form_norm_sq, transform_second_form
from .errors import (
    GeometryError,
    InvalidBracket,
    InvalidDimensions,
    PointOutsideUnitBall,
    ThresholdUnreachable,
    TOutOfRange,
)
from .fields import gram_schmidt_frame
from .stability import c_prime

logger = logging.getLogger(__name__)

CLOSED_FORM_TOLERANCE = 1e-8
ROUND_SPHERE_TOLERANCE = 1e-12
T_MIN_FRACTION = 1e-6
MAX_GRID_POINTS = 10_001
AGREEMENT_TOLERANCE = 1e-6
A_MIN = 1e-2
A_MAX = 100.0
ROOT_TOLERANCE = 1e-10
RECONCILIATION_TOLERANCE = 1e-3
MONOTONICITY_POINTS = 41
SECTIONAL_TOLERANCE = 1e-4
CITED_SLACK = 1e-3


@dataclass(frozen=True)
class EllipsoidSpec:
    a: float
    n: int = 4

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise GeometryError(f'Semi-axis must be a positive number, got {self.a}',
                                error_code='invalid-semi-axis')
        if self.n < 2:
            raise InvalidDimensions(f'Ellipsoid dimension must be at least 2, got {self.n}',
                                    details={'n': self.n})

    @property
    def prefactor(self):
        return (self.a**2 - 1.0) ** 2 / 4.0


@dataclass(frozen=True, eq=False)
class EllipsoidPointData:
    x: np.ndarray
    f: float
    w: float
    gradf_sq: float
    g: np.ndarray
    h: np.ndarray
    nH: float
    normSqH: float
    e_u: float
    u_normal: float
    htilde_sq: float

    @property
    def t(self):
        return self.f**2


def point_data(spec, x):
    """
    Closed-form geometry of the cap at graph coordinates ``x``.

    Raises:
        PointOutsideUnitBall: |x| >= 1
    """
    x = np.asarray(x, dtype=float)
    n, a = spec.n, spec.a
    if x.shape != (n,):
        raise InvalidDimensions(f'Expected a point with {n} coordinates, got shape {x.shape}')
    r_sq = float(x @ x)
    if r_sq >= 1.0:
        raise PointOutsideUnitBall(f'|x|^2 = {r_sq} is not below 1', details={'point': x.tolist()})

    f = a * math.sqrt(1.0 - r_sq)
    grad = -a**2 * x / f
    gradf_sq = float(grad @ grad)
    w = math.sqrt(1.0 + gradf_sq)
    g = np.eye(n) + np.outer(grad, grad)
    h = (a**2 * np.eye(n) + np.outer(grad, grad)) / (w * f)

    tilt = (1.0 - a**2) / w**2
    nH = (n * a**2 + tilt * gradf_sq) / (w * f)
    normSqH = (n * a**4 + tilt**2 * gradf_sq**2 + 2.0 * a**2 * tilt * gradf_sq) / (w * f) ** 2

    e_u = 2.0 / (2.0 + (1.0 - 1.0 / a**2) * f**2)
    u_normal = e_u * a**2 / (w * f)

    E = gram_schmidt_frame(g)
    h_tilde, _ = transform_second_form(E.T @ h @ E, nH / n, u_normal, math.log(e_u))
    return EllipsoidPointData(
        x=x, f=f, w=w, gradf_sq=gradf_sq, g=g, h=h, nH=nH, normSqH=normSqH,
        e_u=e_u, u_normal=u_normal, htilde_sq=float(second_form_norm_sq(h_tilde)),
    )


def axis_point(spec, t):
    """Graph coordinates (r, 0, ..., 0) of the cap point with y^2 = t."""
    x = np.zeros(spec.n)
    x[0] = math.sqrt(max(0.0, 1.0 - t / spec.a**2))
    return x


def g_poly(spec, t):
    """
    The rational function G_n(t) on [0, a^2].

    Raises:
        TOutOfRange: any t outside [0, a^2]
    """
    a, n = spec.a, spec.n
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > a**2) or not np.all(np.isfinite(t_arr)):
        raise TOutOfRange(f't must lie in [0, a^2] = [0, {a**2}]', details={'t': t_arr.tolist()})
    numerator = ((n - 1) * (a**2 - 1) ** 2 * t_arr**4
                 - 2 * (n - 1) * a**4 * (a**2 - 1) * t_arr**3
                 + a**4 * ((n - 1) * a**4 + 9) * t_arr**2
                 - 12 * a**6 * t_arr
                 + 4 * a**8)
    value = numerator / (a**4 + (1 - a**2) * t_arr) ** 3
    return float(value) if value.ndim == 0 else value


def htilde_profile(spec, t_values):
    """
    |h_tilde|^2 at the cap points y^2 = t for a whole grid of t in (0, a^2].

    Same computation as point_data, batched over axis-aligned points: the
    frames and the second-form transform are evaluated on stacks.
    """
    a, n = spec.a, spec.n
    t = np.atleast_1d(np.asarray(t_values, dtype=float))
    if np.any(t <= 0.0) or np.any(t > a**2):
        raise TOutOfRange(f'Profile needs t in (0, {a**2}]', details={'t_min': float(t.min()), 't_max': float(t.max())})

    f = np.sqrt(t)
    r = np.sqrt(np.clip(1.0 - t / a**2, 0.0, None))
    f1 = -a**2 * r / f
    w = np.sqrt(1.0 + f1**2)

    e1 = np.zeros((n, n))
    e1[0, 0] = 1.0
    identity = np.eye(n)
    g = identity + f1[:, None, None] ** 2 * e1
    h = (a**2 * identity + f1[:, None, None] ** 2 * e1) / (w * f)[:, None, None]

    tilt = (1.0 - a**2) / w**2
    nH = (n * a**2 + tilt * f1**2) / (w * f)
    e_u = 2.0 / (2.0 + (1.0 - 1.0 / a**2) * t)
    u_normal = e_u * a**2 / (w * f)

    E = gram_schmidt_frame(g)
    h_frame = np.swapaxes(E, -1, -2) @ h @ E
    h_tilde, _ = transform_second_form(h_frame, nH / n, u_normal, np.log(e_u))
    return second_form_norm_sq(h_tilde)


def closed_vs_oracle(spec, grid_size=1000, edge=0.0):
    """
    Largest relative gap between (a^2 - 1)^2/4 * G_n(t) and point_data's
    |h_tilde|^2 over a t-grid in [a^2 * 1e-6, a^2 (1 - edge)].

    For a = 1 both sides vanish and the gap is absolute.
    """
    if grid_size < 2:
        raise GeometryError(f'grid_size must be >= 2, got {grid_size}', error_code='invalid-argument')
    a = spec.a
    round_sphere = math.isclose(a, 1.0, rel_tol=0.0, abs_tol=1e-15)
    residuals = []
    for t in np.linspace(a**2 * T_MIN_FRACTION, a**2 * (1.0 - edge), grid_size):
        data = point_data(spec, axis_point(spec, t))
        closed = spec.prefactor * g_poly(spec, min(data.t, a**2))
        gap = abs(closed - data.htilde_sq)
        residuals.append(gap if round_sphere else gap / abs(closed))

    worst = float(max(residuals))
    tolerance = ROUND_SPHERE_TOLERANCE if round_sphere else CLOSED_FORM_TOLERANCE
    report = ResidualReport('closed_vs_oracle', worst, grid_size, 0.0, tolerance)
    logger.info(f'closed_vs_oracle a={a}, n={spec.n}: max gap {worst:.3e} over {grid_size} points')
    return report


def cited_max_value(a):
    """The cited piecewise maximum: (1/a - a)^2 for a <= 1, (a^2 - 1)^2 a^2 above."""
    if a <= 1.0:
        return (1.0 / a - a) ** 2
    return (a**2 - 1.0) ** 2 * a**2


@dataclass(frozen=True)
class ConformalMaximum:
    max_value: float
    argmax_t: float
    paper_value: Optional[float]
    agrees: Optional[bool]
    grid_points: int

    def as_dict(self):
        return {
            'max_value': self.max_value,
            'argmax_t': self.argmax_t,
            'paper_value': self.paper_value,
            'agrees': self.agrees,
        }


def _profile_with_endpoints(spec, t):
    values = np.empty_like(t)
    values[0] = spec.prefactor * g_poly(spec, 0.0)
    values[-1] = spec.prefactor * g_poly(spec, spec.a**2)
    values[1:-1] = htilde_profile(spec, t[1:-1])
    return values


def max_conf_ii(spec, grid_points=MAX_GRID_POINTS, report=True):
    """
    Maximum of |h_tilde|^2 over the cap.

    A dense t-grid (endpoint values from G_n(0) and G_n(a^2)) locates the
    maximum; an interior grid argmax is refined by golden-section search on
    the neighbouring cells. The cited value is only defined for n = 4.
    """
    a = spec.a
    t = np.linspace(0.0, a**2, max(int(grid_points), 3))
    values = _profile_with_endpoints(spec, t)
    k = int(np.argmax(values))
    max_value, argmax_t = float(values[k]), float(t[k])

    def negated(s):
        if not 0.0 < s <= a**2:
            return math.inf
        return -float(htilde_profile(spec, s)[0])

    if 0 < k < len(t) - 1:
        try:
            refined = optimize.minimize_scalar(negated, bracket=(t[k - 1], t[k], t[k + 1]), method='golden')
            if 0.0 < refined.x <= a**2 and -refined.fun > max_value:
                max_value, argmax_t = float(-refined.fun), float(refined.x)
        except ValueError as exc:
            logger.debug(f'Golden-section refinement skipped for a={a}: {exc}')

    paper_value = agrees = None
    if spec.n == 4:
        paper_value = cited_max_value(a)
        agrees = abs(max_value - paper_value) <= AGREEMENT_TOLERANCE * max(1.0, paper_value)
        if report and not agrees:
            logger.warning(f'Measured max |h_tilde|^2 = {max_value:.10g} at t = {argmax_t:.6g} '
                           f'disagrees with the closed-form value {paper_value:.10g} (a = {a})')
    return ConformalMaximum(max_value=max_value, argmax_t=argmax_t, paper_value=paper_value,
                            agrees=agrees, grid_points=len(t))


@dataclass(frozen=True)
class InvariantBound:
    bound: float
    c_prime: Optional[float]
    below_c_prime: Optional[bool]


def conformal_invariant_bound(spec, grid_points=MAX_GRID_POINTS, maximum=None):
    """
    max |II|^2 of the stereographic image, an upper bound for the conformal
    invariant, compared with c'(n) when n >= 3.

    ``maximum`` reuses an already computed max_conf_ii result.
    """
    if maximum is None:
        maximum = max_conf_ii(spec, grid_points)
    bound = maximum.max_value
    if spec.n < 3:
        return InvariantBound(bound=bound, c_prime=None, below_c_prime=None)
    threshold = c_prime(spec.n)
    return InvariantBound(bound=bound, c_prime=threshold, below_c_prime=bound < threshold)


BASES = ('paper_closed_form', 'measured_max')


@dataclass(frozen=True)
class AdmissibleRange:
    a1: float
    a2: float
    basis: str
    threshold: float


def _extremum(a, basis, n, grid_points):
    if basis == 'paper_closed_form':
        return cited_max_value(a)
    return max_conf_ii(EllipsoidSpec(a, n), grid_points, report=False).max_value


def _check_monotone(values, increasing, basis, side):
    steps = np.diff(values)
    slack = 1e-9 * np.maximum(1.0, np.abs(values[1:]))
    bad = steps < -slack if increasing else steps > slack
    if np.any(bad):
        raise InvalidBracket(f'{basis} extremum is not monotone on the {side} side of a = 1',
                             details={'basis': basis, 'side': side})


def admissible_range(threshold, basis='paper_closed_form', n=4, grid_points=MAX_GRID_POINTS):
    """
    Interval (a1, a2) around a = 1 on which max |h_tilde|^2 < threshold.

    The extremum is checked to decrease on [A_MIN, 1] and increase on
    [1, A_MAX] before bisecting each side to 1e-10 in a.

    Raises:
        ThresholdUnreachable: no crossing inside [A_MIN, A_MAX]
        InvalidBracket: the extremum is not monotone on a side
    """
    if basis not in BASES:
        raise GeometryError(f'Unknown basis {basis!r}', error_code='invalid-argument')
    if not (threshold > 0.0 and math.isfinite(threshold)):
        raise GeometryError(f'Threshold must be positive, got {threshold}', error_code='invalid-argument')

    def excess(a):
        return _extremum(a, basis, n, grid_points) - threshold

    left_grid = np.geomspace(A_MIN, 1.0, MONOTONICITY_POINTS)
    right_grid = np.geomspace(1.0, A_MAX, MONOTONICITY_POINTS)
    left = np.array([_extremum(a, basis, n, grid_points) for a in left_grid])
    right = np.array([_extremum(a, basis, n, grid_points) for a in right_grid])
    _check_monotone(left, increasing=False, basis=basis, side='lower')
    _check_monotone(right, increasing=True, basis=basis, side='upper')

    if left[0] < threshold or right[-1] < threshold:
        raise ThresholdUnreachable(
            f'Threshold {threshold} is not crossed in [{A_MIN}, {A_MAX}] ({basis})',
            details={'threshold': threshold, 'basis': basis,
                     'extremum_at_a_min': float(left[0]), 'extremum_at_a_max': float(right[-1])},
        )

    a1 = optimize.bisect(excess, A_MIN, 1.0, xtol=ROOT_TOLERANCE)
    a2 = optimize.bisect(excess, 1.0, A_MAX, xtol=ROOT_TOLERANCE)
    logger.info(f'Admissible range for threshold {threshold} ({basis}): ({a1:.10f}, {a2:.10f})')
    return AdmissibleRange(a1=float(a1), a2=float(a2), basis=basis, threshold=float(threshold))


def range_reconciliation(closed, measured, tolerance=RECONCILIATION_TOLERANCE):
    """Warnings for endpoints on which the two bases differ by more than ``tolerance``."""
    warnings = []
    for name in ('a1', 'a2'):
        gap = abs(getattr(closed, name) - getattr(measured, name))
        if gap > tolerance:
            warnings.append(f'measured_{name}_differs_from_closed_form')
            logger.warning(f'{name}: measured basis {getattr(measured, name):.6f} vs closed form '
                           f'{getattr(closed, name):.6f} (gap {gap:.3g})')
    return warnings


def principal_curvatures(spec, t):
    """(kappa_tan, kappa_rad) at y^2 = t: a^2/sqrt(D) and a^4/D^{3/2}, D = a^4 + (1 - a^2) t."""
    a = spec.a
    D = a**4 + (1.0 - a**2) * np.asarray(t, dtype=float)
    return a**2 / np.sqrt(D), a**4 / D**1.5


def sectional_bounds(spec):
    """
    Range of sectional curvatures over the whole ellipsoid.

    Planes spanned by principal directions give kappa_tan^2 = a^4/D (when
    n >= 3) and kappa_tan kappa_rad = a^6/D^2; both are monotone in D, which
    itself is monotone in t, so the extremes sit at the equator or the tip.
    """
    products = []
    for t in (0.0, spec.a**2):
        k_tan, k_rad = principal_curvatures(spec, t)
        products.append(float(k_tan * k_rad))
        if spec.n >= 3:
            products.append(float(k_tan**2))
    return min(products), max(products)


def cited_sectional_bounds(spec):
    """The cited interval: [a^2, 1/a^4] for a < 1 and [1/a^4, a^2] for a > 1."""
    a = spec.a
    return (min(a**2, a**-4), max(a**2, a**-4))


def grid_sectional_range(spec, t_values):
    """Smallest and largest principal-plane sectional curvature over the cap points y^2 = t."""
    k_tan, k_rad = principal_curvatures(spec, t_values)
    products = [k_tan * k_rad]
    if spec.n >= 3:
        products.append(k_tan**2)
    stacked = np.concatenate([np.atleast_1d(p) for p in products])
    return float(stacked.min()), float(stacked.max())


def sectional_range_notes(spec, k_min, k_max, tolerance=SECTIONAL_TOLERANCE):
    """
    Warnings comparing measured sectional extrema with the analytic and the
    cited intervals.

    ``cited_interval_disagreement`` when the extrema leave the cited interval
    by more than CITED_SLACK; ``narrower_than_cited`` when they stay inside
    the analytic range (within ``tolerance``) and that range is strictly
    narrower than the cited one.
    """
    analytic = sectional_bounds(spec)
    cited = cited_sectional_bounds(spec)
    notes = []
    if k_min < cited[0] - CITED_SLACK or k_max > cited[1] + CITED_SLACK:
        logger.warning(f'Measured K in [{k_min:.6g}, {k_max:.6g}] leaves the cited '
                       f'interval [{cited[0]:.6g}, {cited[1]:.6g}] (a = {spec.a})')
        notes.append('cited_interval_disagreement')
    inside_analytic = analytic[0] - tolerance <= k_min and k_max <= analytic[1] + tolerance
    analytic_narrower = analytic[0] > cited[0] + 1e-12 or analytic[1] < cited[1] - 1e-12
    if inside_analytic and analytic_narrower:
        notes.append('narrower_than_cited')
    return notes


def pinching_delta(spec):
    """Cited pinching constant: a^6 for a <= 1 and a^-6 above."""
    a = spec.a
    return a**6 if a <= 1.0 else a**-6


def pinching_interval(m):
    """Semi-axes whose cited pinching reaches 1/sqrt(m + 1): [(m+1)^(-1/12), (m+1)^(1/12)]."""
    return (m + 1) ** (-1.0 / 12.0), (m + 1) ** (1.0 / 12.0)


def condensed_display_gap(spec, t):
    """
    e^{-2u}(|h|^2 + n u_N^2 - 2 n u_N) minus the oracle |h_tilde|^2.

    The transformation law gives -2 u_N nH for the cross term; the gap is
    that difference and is reported, never used.
    """
    data = point_data(spec, axis_point(spec, t))
    condensed = (data.normSqH + spec.n * data.u_normal**2 - 2.0 * spec.n * data.u_normal) / data.e_u**2
    return condensed - data.htilde_sq
