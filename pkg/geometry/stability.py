"""
=============================================================================
STABILITY CONSTANTS AND THE SECOND-FUNDAMENTAL-FORM FUNCTIONAL
=============================================================================

For an n-dimensional minimal submanifold of an m-dimensional M (p = m - n
normal directions inside M) conformally immersed in a round sphere, the
second fundamental form II of M is split into tangent indices i (first n),
M-normal indices alpha (last p) and sphere-normal indices mu. The functional

    F(II) = (1 + 2/p) sum_{i,alpha,mu} b_{i alpha}^2
            - (2/p) sum_mu (sum_i b_ii)(sum_alpha b_alpha alpha)
            + n/(p(p-1)) sum_mu [(sum_alpha b_alpha alpha)^2 - sum_{alpha,beta} b_{alpha beta}^2]

satisfies F(II) <= c1 |II|^2 for every choice of epsilon > 0 in

    F <= (1/p) [ (2 + p) mixed + n eps tangent + (n + p/eps) normal ]

where mixed, tangent and normal are the block sums of |II|^2. The sharp
constants use the epsilon that balances the tangent and normal weights.

CONTENTS:
- xi / constants / c_prime: the constant table
- eps_bound_coefficients / c1_for_eps: the epsilon family of bounds
- AlgII / f_functional / norm_sq / lemma_bound: the functional
- bound_audit / sharpest_ratio: randomized and exact checks of the bound
- curvature_term_coefficient / ambient_curvature_term / prop33_rhs /
  stability_sign_conditions: pointwise pieces of the instability argument

=============================================================================
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import GeometryError, InvalidDimensions, PLessThanTwo

logger = logging.getLogger(__name__)

AUDIT_TOLERANCE = 1e-10
DEGENERATE_NORM = 1e-12
AUDIT_BLOCK_SIZE = 10_000
SYMMETRY_TOLERANCE = 1e-12


def xi(m):
    """Smallest admissible submanifold dimension: 1 for 3 <= m <= 5, 2 for m >= 6."""
    if m < 3:
        raise InvalidDimensions(f'Ambient dimension must be at least 3, got {m}', details={'m': m})
    return 1 if m <= 5 else 2


def _require_dimensions(m, n):
    if m < 3 or not 1 <= n <= m - 2:
        raise InvalidDimensions(f'Need m >= 3 and 1 <= n <= m - 2, got m={m}, n={n}', details={'m': m, 'n': n})


def require_p(p):
    if p < 2:
        raise PLessThanTwo(f'Need p >= 2, got {p}', details={'p': p})


def eps_bound_coefficients(n, p, eps):
    """
    Weights (mixed, tangent, normal) of |II|^2 blocks in the epsilon bound.

    With |II|^2 = 2 mixed + tangent + normal the bound reads
    F <= mixed_w * (2 mixed) + tangent_w * tangent + normal_w * normal.
    """
    require_p(p)
    if not eps > 0.0:
        raise GeometryError(f'epsilon must be positive, got {eps}', error_code='invalid-argument')
    return (1.0 + p / 2.0) / p, n * eps / p, (n + p / eps) / p


def c1_for_eps(n, p, eps):
    """The constant c1 obtained from a given epsilon: the largest block weight."""
    return max(eps_bound_coefficients(n, p, eps))


@dataclass(frozen=True)
class StabilityConstants:
    m: int
    n: int
    p: int
    xi: int
    eps0: float
    c2: float
    c1: float
    c_sharp: float
    c_rough: float
    c_prime_sharp: float
    c_prime_rough: float

    def as_row(self):
        return {
            'm': self.m, 'n': self.n, 'p': self.p, 'xi': self.xi, 'eps0': self.eps0,
            'c2': self.c2, 'c1': self.c1, 'c_sharp': self.c_sharp, 'c_rough': self.c_rough,
        }


def _sharp(m, n):
    """(eps0, c2, c1, c_sharp) for one pair."""
    p = m - n
    eps0 = (1.0 + math.sqrt(1.0 + 4.0 * p / n)) / 2.0
    c2 = max(1.0 + p / 2.0, n * eps0)
    return eps0, c2, c2 / p, n * p / c2


def c_rough(m, n):
    """Rough c(m, n): epsilon = 2 for n = 1 and epsilon = 1 otherwise."""
    _require_dimensions(m, n)
    if n == 1:
        return 2.0 - 4.0 / (m + 1)
    return n * (m - n) / m


def c_prime(m):
    """min of c(m, n) over xi(m) <= n <= m - 2."""
    lowest = xi(m)
    if lowest > m - 2:
        raise InvalidDimensions(f'No admissible n for m={m}', details={'m': m})
    return min(_sharp(m, n)[3] for n in range(lowest, m - 1))


def c_prime_rough(m):
    if m < 3:
        raise InvalidDimensions(f'Ambient dimension must be at least 3, got {m}', details={'m': m})
    return 2.0 - 4.0 / m


def constants(m, n):
    """
    Full constant bundle for (m, n).

    Raises:
        InvalidDimensions: m < 3 or n outside [1, m - 2]
    """
    _require_dimensions(m, n)
    eps0, c2, c1, c_sharp = _sharp(m, n)
    return StabilityConstants(
        m=m,
        n=n,
        p=m - n,
        xi=xi(m),
        eps0=eps0,
        c2=c2,
        c1=c1,
        c_sharp=c_sharp,
        c_rough=c_rough(m, n),
        c_prime_sharp=c_prime(m),
        c_prime_rough=c_prime_rough(m),
    )


@dataclass(frozen=True, eq=False)
class AlgII:
    """Symmetric components b[mu, A, B] on an (n + p)-dim tangent space with q normals."""

    n: int
    p: int
    q: int
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        size = self.n + self.p
        if self.n < 1 or self.p < 1 or self.q < 1:
            raise InvalidDimensions(f'n, p, q must be positive, got {self.n}, {self.p}, {self.q}')
        if b.shape != (self.q, size, size):
            raise InvalidDimensions(f'Expected components of shape {(self.q, size, size)}, got {b.shape}')
        if np.max(np.abs(b - np.swapaxes(b, 1, 2)), initial=0.0) > SYMMETRY_TOLERANCE:
            raise GeometryError('Second fundamental form components must be symmetric in A, B',
                                error_code='asymmetric-tensor')
        object.__setattr__(self, 'b', b)

    @classmethod
    def zeros(cls, n, p, q=1):
        return cls(n, p, q, np.zeros((q, n + p, n + p)))


def _functional(b, n, p):
    """F over stacked components (..., q, n+p, n+p)."""
    tangent_trace = np.trace(b[..., :n, :n], axis1=-2, axis2=-1)
    normal_trace = np.trace(b[..., n:, n:], axis1=-2, axis2=-1)
    mixed = np.sum(np.square(b[..., :n, n:]), axis=(-3, -2, -1))
    cross = np.sum(tangent_trace * normal_trace, axis=-1)
    normal = np.sum(normal_trace**2 - np.sum(np.square(b[..., n:, n:]), axis=(-2, -1)), axis=-1)
    return (1.0 + 2.0 / p) * mixed - (2.0 / p) * cross + n / (p * (p - 1)) * normal


def f_functional(b):
    """
    F(II) for one tensor.

    Raises:
        PLessThanTwo: p < 2
    """
    require_p(b.p)
    return float(_functional(b.b, b.n, b.p))


def norm_sq(b):
    """|II|^2 summed over ordered index pairs."""
    return float(np.sum(np.square(b.b)))


@dataclass(frozen=True)
class LemmaBound:
    functional: float
    bound: float
    slack: float


def lemma_bound(b):
    """F(II) against c1 |II|^2; slack = c1 |II|^2 - F(II) is never negative."""
    c1 = constants(b.n + b.p, b.n).c1
    value = f_functional(b)
    bound = c1 * norm_sq(b)
    return LemmaBound(functional=value, bound=bound, slack=bound - value)


@dataclass(frozen=True)
class AuditResult:
    max_ratio: float
    violations: int
    c1: float
    iterations: int
    n: int
    p: int
    q: int
    seed: int
    resampled: int = 0


def _draw(rng, count, n, p, q, sampler):
    size = n + p
    raw = rng.standard_normal((count, q, size, size))
    if sampler == 'mixed':
        mask = np.zeros((size, size))
        mask[:n, n:] = 1.0
        raw = raw * mask
        return raw + np.swapaxes(raw, -1, -2)
    return 0.5 * (raw + np.swapaxes(raw, -1, -2))


def bound_audit(n, p, q, iterations, seed, sampler='full', block_size=AUDIT_BLOCK_SIZE):
    """
    Randomized check of F(II) <= c1 |II|^2.

    Samples are drawn in blocks of ``block_size``; block k uses the k-th
    child of ``SeedSequence(seed)`` so the result does not depend on how the
    blocks are scheduled. ``sampler='mixed'`` keeps only the b_{i alpha}
    entries.

    Returns:
        AuditResult with the largest ratio and the count of samples above
        c1 + 1e-10
    """
    if iterations < 1:
        raise GeometryError(f'iterations must be >= 1, got {iterations}', error_code='invalid-argument')
    if q < 1 or n < 1:
        raise InvalidDimensions(f'n and q must be positive, got n={n}, q={q}')
    require_p(p)
    if sampler not in ('full', 'mixed'):
        raise GeometryError(f'Unknown sampler {sampler!r}', error_code='invalid-argument')

    c1 = constants(n + p, n).c1
    block_count = math.ceil(iterations / block_size)
    children = np.random.SeedSequence(seed).spawn(block_count)

    max_ratio = -math.inf
    violations = 0
    resampled = 0
    for index, child in enumerate(children):
        rng = np.random.default_rng(child)
        count = min(block_size, iterations - index * block_size)
        samples = _draw(rng, count, n, p, q, sampler)
        norms = np.sum(np.square(samples), axis=(-3, -2, -1))
        degenerate = norms < DEGENERATE_NORM
        while np.any(degenerate):
            resampled += int(np.sum(degenerate))
            samples[degenerate] = _draw(rng, int(np.sum(degenerate)), n, p, q, sampler)
            norms = np.sum(np.square(samples), axis=(-3, -2, -1))
            degenerate = norms < DEGENERATE_NORM
        ratios = _functional(samples, n, p) / norms
        max_ratio = max(max_ratio, float(np.max(ratios)))
        violations += int(np.sum(ratios > c1 + AUDIT_TOLERANCE))

    logger.info(f'Bound audit (n={n}, p={p}, q={q}, {iterations} samples): max ratio {max_ratio:.12g}, '
                f'c1 {c1:.12g}, violations {violations}')
    if violations:
        logger.warning(f'Bound audit found {violations} samples above c1 = {c1:.12g}')
    return AuditResult(max_ratio=max_ratio, violations=violations, c1=c1, iterations=iterations,
                       n=n, p=p, q=q, seed=int(seed), resampled=resampled)


def sharpest_ratio(n, p):
    """
    Exact sup of F(II) / |II|^2.

    Both sides are sums over the normal index, so one slice is enough. F is
    a quadratic form on the independent entries b_AB (A <= B) and |II|^2 a
    diagonal one (weight 2 off the diagonal); the supremum is the largest
    generalized eigenvalue of the pair.
    """
    require_p(p)
    size = n + p
    entries = [(A, B) for A in range(size) for B in range(A, size)]

    def value(coefficients):
        b = np.zeros((1, size, size))
        for (A, B), c in zip(entries, coefficients):
            b[0, A, B] = b[0, B, A] = c
        return float(_functional(b, n, p))

    basis = np.eye(len(entries))
    diagonal = [value(e) for e in basis]
    form = np.diag(diagonal)
    for k in range(len(entries)):
        for l in range(k + 1, len(entries)):
            form[k, l] = form[l, k] = 0.5 * (value(basis[k] + basis[l]) - diagonal[k] - diagonal[l])
    weights = np.diag([1.0 if A == B else 2.0 for A, B in entries])
    return float(linalg.eigh(form, weights, eigvals_only=True)[-1])


def curvature_term_coefficient(n, p, a):
    """Coefficient 4a - 2 - n + p(a - 1)^2 of the |grad u|^2 integrand."""
    return 4 * a - 2 - n + p * (a - 1) ** 2


def ambient_curvature_term(tan_nor_sum, nor_nor_sum, n, p):
    """((2 - p)/p) sum R_{i alpha i alpha} - n/(p(p-1)) sum_{alpha != beta} R_{alpha beta alpha beta}."""
    require_p(p)
    return (2.0 - p) / p * tan_nor_sum - n / (p * (p - 1)) * nor_nor_sum


def prop33_rhs(II_mixed_sq, u_tan_sq, u_norm_sq, ricci_mixed_sum, n, p, a):
    """
    Pointwise right-hand side of the second-variation identity for the
    conformal test fields.

    Raises:
        GeometryError: a squared-norm input is negative
    """
    for name, v in (('II_mixed_sq', II_mixed_sq), ('u_tan_sq', u_tan_sq), ('u_norm_sq', u_norm_sq)):
        if v < 0.0:
            raise GeometryError(f'{name} is a squared norm and cannot be negative, got {v}',
                                error_code='invalid-argument')
    return II_mixed_sq + p * (a - 1) ** 2 * u_tan_sq + n * u_norm_sq - ricci_mixed_sum


@dataclass(frozen=True)
class SignConditions:
    curvature_sums_nonnegative: bool
    curvature_term: float
    coefficient: float
    functional_gap: float

    @property
    def curvature_ok(self):
        return self.curvature_sums_nonnegative and self.curvature_term <= 0.0

    @property
    def coefficient_ok(self):
        return self.coefficient <= 0.0

    @property
    def functional_ok(self):
        return self.functional_gap < 0.0

    @property
    def unstable(self):
        return self.curvature_ok and self.coefficient_ok and self.functional_ok


def stability_sign_conditions(b, tan_nor_sum, nor_nor_sum, a):
    """
    The three sign conditions that force sum_t I(V_t, V_t) < 0, evaluated on
    supplied pointwise data: nonnegative sectional sums (so the ambient
    curvature integrand is <= 0), a non-positive |grad u|^2 coefficient and
    F(II) < n.
    """
    n, p = b.n, b.p
    return SignConditions(
        curvature_sums_nonnegative=tan_nor_sum >= 0.0 and nor_nor_sum >= 0.0,
        curvature_term=ambient_curvature_term(tan_nor_sum, nor_nor_sum, n, p),
        coefficient=curvature_term_coefficient(n, p, a),
        functional_gap=f_functional(b) - n,
    )
