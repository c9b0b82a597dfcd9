"""Admissible exponents and Hardy sums Σ_n |⟨f, φ_n⟩|^s / (|n|+1)^E with a rigorous truncation tail."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .atoms import ProductAtom
from .bases import Family
from .framework.errors import DomainError, ShapeError
from .quadrature import CoefficientCache

logger = logging.getLogger(__name__)

TAIL_BLOCKS = 64  #: Dyadic blocks summed explicitly before the geometric remainder.


def _exact(*values):
    """Fractions when every value is rational (Fraction or int), else None."""
    if all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values):
        return [Fraction(v) for v in values]
    return None


def _check_ps(p, s):
    if not 0 < p <= 1:
        raise DomainError(f'p must lie in (0, 1], got {p}.')
    if not p <= s <= 2:
        raise DomainError(f's must lie in [p, 2], got s={s} for p={p}.')


def gamma_for(system):
    """Kernel regularity exponent γ: 1/2 for standard Laguerre and Jacobi, 1/4 for the Hermite families."""
    if system.family in (Family.LAGUERRE_STD, Family.JACOBI):
        return Fraction(1, 2)
    return Fraction(1, 4)


def admissible_exponent(p, s, d, gamma):
    """E = (2−p)sdγ/p + (2−s)d/2, exact when all inputs are rational."""
    _check_ps(p, s)
    if d < 1:
        raise DomainError(f'd must be a positive integer, got {d}.')
    exact = _exact(p, s, d, gamma)
    if exact:
        p, s, d, gamma = exact
    return (2 - p) * s * d * gamma / p + (2 - s) * d / 2


def theorem_exponent(system, p, s, d=None):
    """Exponent of the Hardy inequality for a concrete system.

    d + sd(1/p − 1) for standard Laguerre and Jacobi functions, d + ds(2 − 3p)/(4p) for the Hermite families.
    """
    d = system.d if d is None else d
    _check_ps(p, s)
    exact = _exact(p, s)
    if exact:
        p, s = exact
    if system.family in (Family.LAGUERRE_STD, Family.JACOBI):
        return d + s * d * (1 / p - 1)
    return d + d * s * (2 - 3 * p) / (4 * p)


@dataclass(frozen=True)
class HardyExponentParams:
    """(p, s, d, γ, E); ``E`` defaults to the admissible exponent."""

    p: object
    s: object
    d: int
    gamma: Fraction
    E: object = None

    def __post_init__(self):
        _check_ps(self.p, self.s)
        if self.E is None:
            object.__setattr__(self, 'E', admissible_exponent(self.p, self.s, self.d, self.gamma))

    @classmethod
    def for_system(cls, system, p, s, E=None):
        return cls(p, s, system.d, gamma_for(system), E)

    def with_E(self, E):
        return HardyExponentParams(self.p, self.s, self.d, self.gamma, E)


@dataclass(frozen=True)
class HardySumResult:
    """Partial sum over |n| ≤ K_max and a bound on the rest; ``tail_unbounded`` when the bound diverges."""

    partial_sum: float
    tail_bound: float
    K_max: int
    tail_unbounded: bool = False

    def to_dict(self):
        return {'partial_sum': self.partial_sum, 'tail_bound': self.tail_bound, 'K_max': self.K_max,
                'tail_unbounded': self.tail_unbounded}


def shell_sums(sequences, K_max):
    """Σ_{|n| = m} Π_i x_i(n_i) for m = 0..K_max, by d-fold convolution of the one-dimensional sequences."""
    result = np.ones(1)
    for seq in sequences:
        result = np.convolve(result, np.asarray(seq, dtype=float)[:K_max + 1])[:K_max + 1]
    if result.size < K_max + 1:
        result = np.concatenate([result, np.zeros(K_max + 1 - result.size)])
    return result


def block_count(lo, hi, d):
    """#{n ∈ ℕ^d : lo ≤ |n| < hi}."""
    return math.comb(hi - 1 + d, d) - math.comb(lo - 1 + d, d)


def dyadic_tail_bound(energy, K_max, E, s, d):
    """Bound on Σ_{|n| > K_max} |c_n|^s/(|n|+1)^E given Σ_{|n| > K_max} |c_n|² ≤ ``energy``.

    Blocks [L, 2L) starting at L = K_max + 1 contribute at most N^{1−s/2}·energy^{s/2}·(L+1)^{−E} by Hölder's
    inequality; after :data:`TAIL_BLOCKS` blocks the rest is bounded by a geometric series.

    :return: (bound, unbounded flag).
    """
    if energy <= 0:
        return 0., False
    E, s = float(E), float(s)
    if E <= d * (1 - s / 2):
        return math.inf, True
    total = 0.
    previous = None
    lo = K_max + 1
    for _ in range(TAIL_BLOCKS):
        hi = 2 * lo
        term = float(block_count(lo, hi, d)) ** (1 - s / 2) * energy ** (s / 2) * (lo + 1.) ** (-E)
        total += term
        ratio = term / previous if previous else None
        previous = term
        lo = hi
    ratio = max(ratio, 2. ** (d * (1 - s / 2) - E))
    if ratio >= 1:
        return math.inf, True
    return total + previous * ratio / (1 - ratio), False


def hardy_sum_from_coefficients(coefficients, E, s, l2_norm_sq, K_max):
    """Hardy sum from one-dimensional coefficient sequences of a product function.

    :param coefficients: Sequence of d arrays c_i(k), k ≤ K_max (a single array for d = 1).
    :param E: Exponent.
    :param s: Power of the coefficients.
    :param l2_norm_sq: ∥f∥²_{L²}, bounding the Bessel energy of the tail.
    :param K_max: Largest shell |n| summed explicitly.
    """
    if isinstance(coefficients, np.ndarray) and coefficients.ndim == 1:
        coefficients = [coefficients]
    coefficients = [np.abs(np.asarray(c, dtype=float)) for c in coefficients]
    if any(c.size < K_max + 1 for c in coefficients):
        raise ShapeError(f'Need {K_max + 1} coefficients per coordinate.')
    d = len(coefficients)
    s_f, E_f = float(s), float(E)
    shells = shell_sums([c ** s_f for c in coefficients], K_max)
    weights = (np.arange(K_max + 1) + 1.) ** (-E_f)
    partial = float(np.sum(shells * weights))
    energy = float(np.sum(shell_sums([c ** 2 for c in coefficients], K_max)))
    remaining = max(float(l2_norm_sq) - energy, 0.)
    tail, unbounded = dyadic_tail_bound(remaining, K_max, E, s, d)
    logger.debug('Hardy sum E=%s s=%s K_max=%d: partial %.6g, tail %.3g.', E, s, K_max, partial, tail)
    return HardySumResult(partial, tail, K_max, unbounded)


def hardy_sum(system, a, params, K_max, tol=1e-12, cache=None):
    """Hardy sum of an atom against a system.

    :param system: :obj:`.bases.SystemSpec`.
    :param a: :obj:`.atoms.ProductAtom` (or a one-dimensional atom for d = 1).
    :param params: :obj:`HardyExponentParams` supplying s and E.
    :param K_max: Largest shell |n| summed explicitly.
    """
    if not isinstance(a, ProductAtom):
        a = ProductAtom((a,))
    if a.d != system.d:
        raise ShapeError(f'Atom dimension {a.d} does not match system dimension {system.d}.')
    cache = CoefficientCache() if cache is None else cache
    coefficients = [cache.get(system.coordinate(i), factor, K_max, abs_tol=tol) for i, factor in enumerate(a.factors)]
    return hardy_sum_from_coefficients(coefficients, params.E, params.s, a.l2_norm_sq(), K_max)

