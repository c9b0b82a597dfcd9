"""H^p atoms: the explicit piecewise-constant counterexample atom and a generic (p, q)-atom validator.

All constants, breakpoints and moments are exact :obj:`fractions.Fraction` values on the unit support (0, 1); the
dilation A and the amplitude A^{1/p} are floats applied on top, so that vanishing moments can be checked with exact
zero residuals.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np
import pandas as pd

from .framework.errors import DomainError, Error, ShapeError

logger = logging.getLogger(__name__)


def as_fraction(value):
    """Exact rational for ``value``: Fractions and ints as they are, floats as the decimal they print as."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    if not math.isfinite(value):
        raise DomainError(f'Expected a finite number, got {value}.')
    return Fraction(repr(float(value)))


def vanishing_order(p, d=1):
    """⌊d(1/p − 1)⌋, the highest moment degree an H^p atom must annihilate."""
    p = as_fraction(p)
    if not 0 < p <= 1:
        raise DomainError(f'p must lie in (0, 1], got {p}.')
    return math.floor(d * (1 / p - 1))


@dataclass(frozen=True)
class PiecewiseConstant1D:
    """Piecewise-constant function on (0, b_m / A).

    On the unit scale the function equals ``unit_values[i]`` on (``unit_breakpoints[i]``, ``unit_breakpoints[i+1]``);
    the actual function is amplitude·unit(A·u).

    :param unit_breakpoints: 0 = b_0 < b_1 < … < b_m, exact.
    :param unit_values: m exact values.
    :param dilation: A ≥ 1.
    :param amplitude: Factor applied to all values.
    """

    unit_breakpoints: tuple
    unit_values: tuple
    dilation: float = 1.
    amplitude: float = 1.
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        bps = tuple(as_fraction(b) for b in self.unit_breakpoints)
        vals = tuple(as_fraction(v) for v in self.unit_values)
        object.__setattr__(self, 'unit_breakpoints', bps)
        object.__setattr__(self, 'unit_values', vals)
        if len(bps) != len(vals) + 1 or not vals:
            raise ShapeError(f'Need m + 1 breakpoints for m values, got {len(bps)} and {len(vals)}.')
        if bps[0] != 0 or any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise DomainError(f'Breakpoints must start at 0 and increase strictly: {[str(b) for b in bps]}.')
        if not self.dilation > 0:
            raise DomainError(f'Dilation must be positive, got {self.dilation}.')

    @cached_property
    def breakpoints(self):
        """Breakpoints b_i / A as floats, computed once."""
        return np.array([float(b) / self.dilation for b in self.unit_breakpoints])

    @cached_property
    def values(self):
        return np.array([self.amplitude * float(v) for v in self.unit_values])

    @property
    def support_right(self):
        return self.breakpoints[-1]

    @property
    def pieces(self):
        """(left, right, value) per piece, in floats."""
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:], self.values))

    @cached_property
    def content_hash(self):
        """Stable hash of the exact content, used as a coefficient cache key."""
        payload = '|'.join([','.join(map(str, self.unit_breakpoints)), ','.join(map(str, self.unit_values)),
                            repr(float(self.dilation)), repr(float(self.amplitude))])
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:32]

    def l2_norm_sq(self):
        return float(sum(v * v * (r - l) for l, r, v in self.pieces))

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def unit_moment(self, n):
        """(∫ unit·x^n, ∫ |unit|·x^n) over the unit support, exact."""
        signed = absolute = Fraction(0)
        for b0, b1, v in zip(self.unit_breakpoints, self.unit_breakpoints[1:], self.unit_values):
            piece = (b1 ** (n + 1) - b0 ** (n + 1)) / (n + 1)
            signed += v * piece
            absolute += abs(v) * piece
        return signed, absolute

    def normalized_moment_residual(self, n):
        """|∫ a x^n| / ∫ |a| x^n; dilation and amplitude cancel, 0/0 is taken as 0."""
        signed, absolute = self.unit_moment(n)
        return abs(signed) / absolute if absolute else Fraction(0)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.breakpoints, u, side='right') - 1
        inside = (u > 0) & (u < self.support_right)
        return np.where(inside, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.)


@dataclass(frozen=True)
class ProductAtom:
    """Tensor product A(x) = Π a_i(x_i)."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, 'factors', tuple(self.factors))
        if not self.factors:
            raise ShapeError('A product atom needs at least one factor.')

    @property
    def d(self):
        return len(self.factors)

    def l2_norm_sq(self):
        return float(np.prod([f.l2_norm_sq() for f in self.factors]))


@dataclass(frozen=True)
class AtomReport:
    """Result of :func:`validate_atom`.

    ``sup_norm_ratio`` is ∥a∥_q·|B|^{1/p − 1/q} against the smallest ball containing the support; for product atoms
    ``support_slack`` is the factor (|B|/|Q|)^{1/p} between that ball and the support cube Q.
    """

    moment_residuals: dict
    sup_norm_ratio: float
    is_atom: bool
    support_slack: float = 1.

    def to_dict(self):
        return {'moment_residuals': {str(k): v for k, v in self.moment_residuals.items()},
                'sup_norm_ratio': self.sup_norm_ratio, 'support_slack': self.support_slack, 'is_atom': self.is_atom}


def _ball_volume(d, radius):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius ** d


def _size_ratio(norm, measure, p, q):
    exponent = 1 / float(p) - (0. if q == math.inf else 1 / q)
    return norm * measure ** exponent if norm else 0.


def validate_atom(a, p, q=math.inf, tol=1e-12):
    """Check moments and size of a one-dimensional or product atom.

    :param a: :obj:`PiecewiseConstant1D` or :obj:`ProductAtom`.
    :param p: 0 < p ≤ 1.
    :param q: 2 or ``math.inf``.
    :param tol: Tolerance on residuals and on the size ratio.
    """
    if q not in (2, math.inf):
        raise DomainError(f'Only q = 2 and q = inf are supported, got {q}.')
    factors = a.factors if isinstance(a, ProductAtom) else (a,)
    d = len(factors)
    degree = vanishing_order(p, d)
    residuals = {}
    for n in product(range(degree + 1), repeat=d):
        if sum(n) > degree:
            continue
        residual = Fraction(1)
        for factor, n_i in zip(factors, n):
            residual *= factor.normalized_moment_residual(n_i)
        residuals[n if d > 1 else n[0]] = residual

    sides = [f.support_right for f in factors]
    if q == math.inf:
        norm = float(np.prod([f.sup_norm() for f in factors]))
    else:
        norm = math.sqrt(float(np.prod([f.l2_norm_sq() for f in factors])))
    if d == 1:
        ratio, slack = _size_ratio(norm, sides[0], p, q), 1.
    else:
        cube = float(np.prod(sides))
        ball = _ball_volume(d, math.sqrt(sum(s * s for s in sides)) / 2)
        ratio = _size_ratio(norm, ball, p, q)
        slack = (ball / cube) ** (1 / float(p) - (0. if q == math.inf else 1 / q))
    is_atom = all(r <= tol for r in residuals.values()) and ratio <= (1 + tol) * slack
    logger.debug('Atom check p=%s q=%s: %d moments, size ratio %.6g, slack %.6g.', p, q, len(residuals), ratio, slack)
    return AtomReport({k: float(v) for k, v in residuals.items()}, float(ratio), bool(is_atom), float(slack))


# Counterexample atom --------------------------------------------------------------------------------------------------

def _check_delta(P, delta):
    delta = as_fraction(delta)
    if not 0 < delta <= Fraction(1, 2 * (P + 1)):
        raise DomainError(f'delta must lie in (0, 1/{2 * (P + 1)}] for P = {P}, got {delta}.')
    return delta


def moment_system(P, delta):
    """Matrix and right-hand side of the moment conditions for C_1, …, C_{P+1}, rows n = 0, …, P."""
    matrix = []
    rhs = []
    for n in range(P + 1):
        row = [delta ** (n + 1) * ((i + 1) ** (n + 1) - i ** (n + 1)) for i in range(1, P + 1)]
        row.append(1 - ((P + 1) * delta) ** (n + 1))
        matrix.append(row)
        rhs.append(delta ** (n + 1))
    return matrix, rhs


def solve_moment_system(P, delta):
    """C_1, …, C_{P+1} by exact Gaussian elimination of the moment conditions."""
    if P < 0:
        raise DomainError(f'P must be a natural number, got {P}.')
    delta = _check_delta(P, delta)
    matrix, rhs = moment_system(P, delta)
    size = P + 1
    rows = [row + [b] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            raise Error(f'Moment system is singular for P={P}, delta={delta}.')
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return [rows[i][size] / rows[i][i] for i in range(size)]


def counterexample_constants(P, delta):
    """C_i = Σ_{ℓ=0}^{i} binom(P+1, ℓ)(−1)^{ℓ−1}/(1 − ℓδ), i = 1, …, P+1, exact.

    :raises DomainError: unless 0 < δ ≤ 1/(2(P+1)).
    """
    if P < 0:
        raise DomainError(f'P must be a natural number, got {P}.')
    delta = _check_delta(P, delta)
    constants = [sum(Fraction(math.comb(P + 1, l) * (-1) ** (l - 1)) / (1 - l * delta) for l in range(i + 1))
                 for i in range(1, P + 2)]
    matrix, rhs = moment_system(P, delta)
    if any(sum(m * c for m, c in zip(row, constants)) != b for row, b in zip(matrix, rhs)):
        raise Error(f'Closed-form constants do not solve the moment system for P={P}, delta={delta}.')
    return constants


def build_counterexample_atom(p, A, delta=None):
    """The counterexample atom with support (0, 1/A).

    Values are 2^{−(P+2)}A^{1/p}·{−1, C_1, …, C_{P+1}} on the pieces cut at jδ/A, j = 0, …, P+1, and 1/A, with
    P = ⌊1/p − 1⌋.

    :param p: 0 < p ≤ 1 (exact when given as Fraction).
    :param A: Dilation, A ≥ 1.
    :param delta: 0 < δ ≤ 1/(2(P+1)); default 1/(8(P+1)).
    """
    P = vanishing_order(p)
    if not A >= 1:
        raise DomainError(f'A must be at least 1, got {A}.')
    delta = Fraction(1, 8 * (P + 1)) if delta is None else _check_delta(P, delta)
    constants = counterexample_constants(P, delta)
    scale = Fraction(1, 2 ** (P + 2))
    breakpoints = [j * delta for j in range(P + 2)] + [Fraction(1)]
    values = [-scale] + [scale * c for c in constants]
    amplitude = float(A) ** (1 / float(as_fraction(p)))
    return PiecewiseConstant1D(tuple(breakpoints), tuple(values), float(A), amplitude,
                               meta={'p': as_fraction(p), 'A': float(A), 'delta': delta})


def c_last_scaling(P, delta_grid):
    """|C_{P+1}|/δ^{P+1} over a grid of δ.

    :return: (table with columns delta, C_last, ratio; summary dict with min, max, their quotient and whether the
      sign of C_{P+1} is (−1)^P everywhere).
    """
    rows = []
    for delta in delta_grid:
        delta = _check_delta(P, delta)
        c_last = counterexample_constants(P, delta)[-1]
        rows.append({'delta': str(delta), 'C_last': float(c_last),
                     'ratio': float(abs(c_last) / delta ** (P + 1)), 'sign_ok': (c_last > 0) == (P % 2 == 0)})
    table = pd.DataFrame(rows, columns=['delta', 'C_last', 'ratio', 'sign_ok'])
    lo, hi = table['ratio'].min(), table['ratio'].max()
    return table, {'min': float(lo), 'max': float(hi), 'bracket': float(hi / lo), 'sign_ok': bool(table['sign_ok'].all())}


def atom_to_json(a):
    """{p, A, delta, breakpoints, values} with decimals printed to 17 significant digits."""
    meta = a.meta
    return {
        'p': str(meta['p']) if 'p' in meta else None,
        'A': format(float(a.dilation), '.17g'),
        'delta': str(meta['delta']) if 'delta' in meta else None,
        'breakpoints': [format(b, '.17g') for b in a.breakpoints],
        'values': [format(v, '.17g') for v in a.values],
    }


def atom_from_json(data):
    """Rebuild an atom written by :func:`atom_to_json`.

    Counterexample atoms (with p and delta) are rebuilt exactly; anything else becomes a generic piecewise-constant
    function with the exact decimals of the printed breakpoints and values.
    """
    try:
        if data.get('p') and data.get('delta'):
            return build_counterexample_atom(Fraction(data['p']), float(data['A']), Fraction(data['delta']))
        breakpoints = [Fraction(b) for b in data['breakpoints']]
        values = [Fraction(v) for v in data['values']]
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as e:
        raise DomainError(f'Invalid atom description: {e}')
    return PiecewiseConstant1D(tuple(breakpoints), tuple(values))
