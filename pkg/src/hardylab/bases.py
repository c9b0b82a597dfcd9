"""Orthonormal function systems and their derivatives.

Four families are supported:

- standard Laguerre functions ℒ_k^α on (0, ∞),
- Laguerre functions of Hermite type φ_k^α(u) = √(2u)·ℒ_k^α(u²) on (0, ∞),
- generalized Hermite functions h_k^λ on ℝ,
- Jacobi trigonometric functions φ_k^{α,β}(θ) on (0, π).

Values come from recurrences on the *normalized* functions, carried with a per-point log scale so that neither the
Γ-ratios nor the exponential weights overflow for large k or large arguments.  Derivatives come from repeatedly
applying the first-derivative recurrence of each family to a list of terms c(k)·x^e·(1+t²)^b·φ_{k+dk}^{α+da,β+db},
which stays finite under differentiation.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from numbers import Real

import numpy as np
from scipy import special

from .framework.errors import DomainError, ShapeError, UnsupportedError, UnsupportedOrderError

logger = logging.getLogger(__name__)

MAX_EXACT_ORDER = 4  #: Highest derivative order from the exact term expansion.
MAX_ORDER = 6  #: Highest derivative order overall; orders above MAX_EXACT_ORDER use finite differences.
_RESCALE = 1e100
_LOG_RESCALE = math.log(_RESCALE)


class Family(Enum):
    """Orthonormal families."""

    LAGUERRE_STD = 'laguerre-std'
    LAGUERRE_HERMITE = 'laguerre-hermite'
    GENERALIZED_HERMITE = 'generalized-hermite'
    JACOBI = 'jacobi'


@dataclass(frozen=True)
class DomainBox:
    """Product of open intervals."""

    lower: tuple
    upper: tuple

    @classmethod
    def for_family(cls, family, d=1):
        lo, hi = {
            Family.LAGUERRE_STD: (0., np.inf),
            Family.LAGUERRE_HERMITE: (0., np.inf),
            Family.GENERALIZED_HERMITE: (-np.inf, np.inf),
            Family.JACOBI: (0., np.pi),
        }[family]
        return cls((lo,) * d, (hi,) * d)

    def contains(self, x):
        """Whether all coordinates of ``x`` (shape (..., d)) lie strictly inside the box."""
        x = np.asarray(x, dtype=float)
        return bool(np.all((x > np.array(self.lower)) & (x < np.array(self.upper))))


def _as_tuple(value, d):
    if value is None:
        return ()
    if isinstance(value, (Real, str)) or np.ndim(value) == 0:
        return (value,) * d
    return tuple(value)


@dataclass(frozen=True)
class SystemSpec:
    """An orthonormal system: family, type parameters (one per coordinate) and dimension.

    Parameters are kept as given (``Fraction`` or float) so exponent arithmetic elsewhere can stay exact.
    """

    family: Family
    alpha: tuple = ()
    beta: tuple = ()
    lam: tuple = ()
    d: int = 1

    def __post_init__(self):
        if not isinstance(self.family, Family):
            object.__setattr__(self, 'family', Family(self.family))
        for name in ('alpha', 'beta', 'lam'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.d < 1:
            raise ShapeError(f'Dimension must be positive, got {self.d}.')
        required = {
            Family.LAGUERRE_STD: ('alpha',),
            Family.LAGUERRE_HERMITE: ('alpha',),
            Family.GENERALIZED_HERMITE: ('lam',),
            Family.JACOBI: ('alpha', 'beta'),
        }[self.family]
        for name in ('alpha', 'beta', 'lam'):
            values = getattr(self, name)
            if name in required and len(values) != self.d:
                raise ShapeError(f'{self.family.value} needs {self.d} value(s) for {name}, got {len(values)}.')
            if name not in required and values:
                raise ShapeError(f'{self.family.value} does not take parameter {name}.')
        if self.family is Family.LAGUERRE_STD and any(not a > -1 for a in self.alpha):
            raise DomainError(f'Standard Laguerre functions need alpha > -1, got {self.alpha}.')
        if self.family is Family.LAGUERRE_HERMITE and any(not a >= -0.5 for a in self.alpha):
            raise DomainError(f'Hermite-type Laguerre functions need alpha >= -1/2, got {self.alpha}.')
        if self.family is Family.GENERALIZED_HERMITE and any(not lam >= 0 for lam in self.lam):
            raise DomainError(f'Generalized Hermite functions need lambda >= 0, got {self.lam}.')
        if self.family is Family.JACOBI and any(not v >= -0.5 for v in self.alpha + self.beta):
            raise DomainError(f'Jacobi functions need alpha, beta >= -1/2, got {self.alpha}, {self.beta}.')

    @classmethod
    def build(cls, family, alpha=None, beta=None, lam=None, d=1):
        """Build a system, replicating scalar parameters over ``d`` coordinates."""
        return cls(Family(family), _as_tuple(alpha, d), _as_tuple(beta, d), _as_tuple(lam, d), d)

    def coordinate(self, i):
        """One-dimensional system of coordinate ``i``."""
        if not 0 <= i < self.d:
            raise ShapeError(f'Coordinate {i} out of range for dimension {self.d}.')
        return SystemSpec(self.family, self.alpha[i:i + 1], self.beta[i:i + 1], self.lam[i:i + 1], 1)

    @property
    def domain(self):
        return DomainBox.for_family(self.family, self.d)

    @property
    def key(self):
        """Hashable, JSON-friendly description used in cache keys and run records."""
        return (self.family.value, tuple(str(a) for a in self.alpha), tuple(str(b) for b in self.beta),
                tuple(str(v) for v in self.lam), self.d)

    def describe(self):
        result = {'family': self.family.value, 'd': self.d}
        for name in ('alpha', 'beta', 'lam'):
            if getattr(self, name):
                result[name] = [str(v) for v in getattr(self, name)]
        return result

    def _require_1d(self):
        if self.d != 1:
            raise ShapeError(f'Expected a one-dimensional system, got d={self.d}.')

    @property
    def a(self):
        """α (or λ for generalized Hermite) of a one-dimensional system, as float."""
        return float(self.lam[0] if self.family is Family.GENERALIZED_HERMITE else self.alpha[0])

    @property
    def b(self):
        """β of a one-dimensional Jacobi system, as float."""
        return float(self.beta[0])

    def shifted(self, da=0, db=0):
        """One-dimensional system with type parameters raised by ``da`` (α) and ``db`` (β)."""
        self._require_1d()
        if self.family is Family.JACOBI:
            return SystemSpec(self.family, (self.a + da,), (self.b + db,))
        return SystemSpec(self.family, (self.a + da,))


@dataclass(frozen=True)
class MultiIndex:
    """n ∈ ℕ^d."""

    n: tuple

    def __post_init__(self):
        object.__setattr__(self, 'n', tuple(int(v) for v in self.n))
        if any(v < 0 for v in self.n):
            raise DomainError(f'Multi-index entries must be non-negative, got {self.n}.')

    @property
    def length(self):
        return sum(self.n)

    @property
    def d(self):
        return len(self.n)


def k_prime(k, alpha):
    """k′ = max(4k + 2α + 2, 2)."""
    return np.maximum(4 * np.asarray(k, dtype=float) + 2 * alpha + 2, 2.)


def _log_power(x, a):
    """a·log(x) with the convention 0·log(0) = 0."""
    if a == 0:
        return np.zeros_like(x)
    with np.errstate(divide='ignore'):
        return a * np.log(x)


def _signed_exp(v, log_multiplier):
    """v·exp(log_multiplier), computed as sign(v)·exp(log|v| + log_multiplier)."""
    with np.errstate(divide='ignore', over='ignore'):
        return np.sign(v) * np.exp(np.log(np.abs(v)) + log_multiplier)


def is_smooth_at_zero(system):
    """Whether a one-dimensional system extends smoothly through u = 0 (α+1/2 ∈ ℕ, or even λ)."""
    system._require_1d()
    if system.family is Family.LAGUERRE_HERMITE:
        m = system.a + 0.5
        return m == int(m)
    if system.family is Family.GENERALIZED_HERMITE:
        return system.a == int(system.a) and int(system.a) % 2 == 0
    return False


def check_domain(system, u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError('Evaluation points must be finite.')
    family = system.family
    if family is Family.GENERALIZED_HERMITE:
        return u
    if family is Family.JACOBI:
        if np.any((u <= 0) | (u >= np.pi)):
            raise DomainError(f'Jacobi functions live on (0, pi); got points outside: {u[(u <= 0) | (u >= np.pi)]}.')
        return u
    if np.any(u < 0) or (np.any(u == 0) and not is_smooth_at_zero(system)):
        raise DomainError(f'{family.value} functions live on (0, inf); u = 0 is allowed only for the smooth '
                          'extension (alpha + 1/2 a natural number).')
    return u


def _laguerre_rows(kmax, alpha, x, log_prefactor):
    """Rows k = 0..kmax of prefactor·(normalized Laguerre recurrence in x)."""
    rows = np.empty((kmax + 1, x.size))
    v_prev = np.zeros(x.size)
    v = np.ones(x.size)
    log_scale = np.zeros(x.size)
    rows[0] = np.exp(log_prefactor)
    for k in range(kmax):
        v_next = ((2 * k + 1 + alpha - x) * v - math.sqrt(k * (k + alpha)) * v_prev) / math.sqrt(
            (k + 1) * (k + alpha + 1))
        v_prev, v = v, v_next
        big = np.abs(v) > _RESCALE
        if big.any():
            v[big] /= _RESCALE
            v_prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        rows[k + 1] = _signed_exp(v, log_scale + log_prefactor)
    return rows


def _std_rows(kmax, alpha, u):
    with np.errstate(divide='ignore'):
        log_prefactor = -u / 2 + _log_power(u, alpha / 2) - 0.5 * special.gammaln(alpha + 1)
    return _laguerre_rows(kmax, alpha, u, log_prefactor)


def _hermite_rows(kmax, alpha, u):
    log_prefactor = 0.5 * math.log(2) + _log_power(u, alpha + 0.5) - u * u / 2 - 0.5 * special.gammaln(alpha + 1)
    return _laguerre_rows(kmax, alpha, u * u, log_prefactor)


def _generalized_hermite_rows(kmax, lam, u):
    rows = np.empty((kmax + 1, u.size))
    au = np.abs(u)
    even = _hermite_rows(kmax // 2, lam - 0.5, au)
    m = np.arange(kmax // 2 + 1)
    rows[0::2] = ((-1.) ** m)[:, None] * even / math.sqrt(2)
    if kmax >= 1:
        odd = _hermite_rows((kmax - 1) // 2, lam + 0.5, au)
        m = np.arange((kmax - 1) // 2 + 1)
        rows[1::2] = ((-1.) ** m)[:, None] * np.sign(u)[None, :] * odd / math.sqrt(2)
    return rows


def jacobi_log_norm(k, alpha, beta):
    """log c_k^{α,β} for an array of degrees.

    For k = 0 the product (2k+α+β+1)Γ(k+α+β+1) is written as Γ(α+β+2), which also covers α+β = −1 where the
    product degenerates to 0·Γ(0) and the value 1 is used.
    """
    k = np.asarray(k, dtype=float)
    ab = alpha + beta
    with np.errstate(divide='ignore', invalid='ignore'):
        general = np.log(2 * k + ab + 1) + special.gammaln(k + ab + 1)
    head = np.where(k == 0, special.gammaln(ab + 2), general)
    return 0.5 * (head + special.gammaln(k + 1) - special.gammaln(k + alpha + 1) - special.gammaln(k + beta + 1))


def _jacobi_rows(kmax, alpha, beta, theta):
    x = np.cos(theta)
    polys = np.empty((kmax + 1, theta.size))
    polys[0] = 1.
    ab = alpha + beta
    if kmax >= 1:
        polys[1] = (alpha + 1) + (ab + 2) * (x - 1) / 2
    for n in range(1, kmax):
        c = 2 * n + ab
        polys[n + 1] = (((c + 1) * (alpha ** 2 - beta ** 2) + (c + 2) * (c + 1) * c * x) * polys[n]
                        - 2 * (n + alpha) * (n + beta) * (c + 2) * polys[n - 1]) / (2 * (n + 1) * (n + ab + 1) * c)
    log_weight = _log_power(np.sin(theta / 2), alpha + 0.5) + _log_power(np.cos(theta / 2), beta + 0.5)
    log_norm = jacobi_log_norm(np.arange(kmax + 1), alpha, beta)
    return polys * np.exp(log_norm[:, None] + log_weight[None, :])


def _rows_unchecked(system, kmax, u):
    family = system.family
    if family is Family.LAGUERRE_STD:
        return _std_rows(kmax, system.a, u)
    if family is Family.LAGUERRE_HERMITE:
        return _hermite_rows(kmax, system.a, u)
    if family is Family.GENERALIZED_HERMITE:
        return _generalized_hermite_rows(kmax, system.a, u)
    return _jacobi_rows(kmax, system.a, system.b, u)


def eval_rows(system, kmax, u):
    """Values of φ_0, …, φ_kmax of a one-dimensional system at the points ``u``.

    :param system: One-dimensional :obj:`SystemSpec`.
    :param kmax: Highest index.
    :param u: Points in the family domain (array).
    :return: Array of shape (kmax + 1, len(u)).
    """
    system._require_1d()
    if kmax < 0:
        raise DomainError(f'Index must be non-negative, got {kmax}.')
    u = check_domain(system, np.atleast_1d(u)).ravel()
    return _rows_unchecked(system, kmax, u)


def eval_1d(system, k, u):
    """φ_k(u) for a one-dimensional system; ``u`` may be a scalar or an array."""
    values = eval_rows(system, k, u)[k]
    return float(values[0]) if np.ndim(u) == 0 else values.reshape(np.shape(u))


def eval_tensor(system, n, x):
    """Tensor-product function φ_n(x) = Π φ_{n_i}(x_i).

    :param system: :obj:`SystemSpec` of dimension d.
    :param n: :obj:`MultiIndex` (or sequence) of length d.
    :param x: Point(s) of shape (d,) or (..., d).
    """
    n = n if isinstance(n, MultiIndex) else MultiIndex(tuple(n))
    x = np.asarray(x, dtype=float)
    if n.d != system.d or x.shape[-1:] != (system.d,):
        raise ShapeError(f'Dimension mismatch: system d={system.d}, multi-index {n.n}, point shape {x.shape}.')
    value = np.ones(x.shape[:-1])
    for i in range(system.d):
        value = value * eval_1d(system.coordinate(i), n.n[i], x[..., i])
    return float(value) if value.ndim == 0 else value


# Derivatives ----------------------------------------------------------------------------------------------------------
#
# A term list is a dict {(e, b, dk, da, db): coefficient array over k}.  The term stands for
# coefficient(k)·x^e·(1+t²)^b·φ_{k+dk}^{α+da, β+db}(x), where x is u for the Laguerre families and t = tan(θ/2) for
# Jacobi; b is only used by Jacobi.

def _add_term(terms, key, coef):
    if key in terms:
        terms[key] = terms[key] + coef
    else:
        terms[key] = coef


def _differentiate(system, terms, ks):
    family = system.family
    result = {}
    for (e, b, dk, da, db), c in terms.items():
        kk = np.clip(ks + dk, 0, None).astype(float)
        a = system.a + da
        if family is Family.LAGUERRE_STD:
            _add_term(result, (e - 1, b, dk, da, db), c * (e + a / 2))
            _add_term(result, (e, b, dk, da, db), -c / 2)
            _add_term(result, (e - 0.5, b, dk - 1, da + 1, db), -c * np.sqrt(kk))
        elif family is Family.LAGUERRE_HERMITE:
            _add_term(result, (e - 1, b, dk, da, db), c * (e + a + 0.5))
            _add_term(result, (e + 1, b, dk, da, db), -c)
            _add_term(result, (e, b, dk - 1, da + 1, db), -2 * c * np.sqrt(kk))
        elif family is Family.JACOBI:
            bb = system.b + db
            _add_term(result, (e - 1, b, dk, da, db), c * (e / 2 + (2 * a + 1) / 4))
            _add_term(result, (e + 1, b, dk, da, db), c * (e / 2 + b - (2 * bb + 1) / 4))
            _add_term(result, (e, b, dk - 1, da + 1, db + 1), -c * np.sqrt(kk * (kk + a + bb + 1)))
        else:
            raise UnsupportedError(f'No derivative recurrence for {family.value}.')
    return {key: c for key, c in result.items() if np.any(c != 0)}


def _evaluate_terms(system, terms, ks, x):
    """Sum of a term list for each k in ``ks`` at the points ``x`` (u for Laguerre, θ for Jacobi)."""
    kmax = int(ks.max())
    if system.family is Family.JACOBI:
        var = np.tan(x / 2)
        one_plus = 1 + var * var
    else:
        var = x
        one_plus = None
    result = np.zeros((ks.size, x.size))
    rows_cache = {}
    for (e, b, dk, da, db), c in sorted(terms.items()):
        if (da, db) not in rows_cache:
            rows_cache[(da, db)] = _rows_unchecked(system.shifted(da, db), kmax, x)
        rows = rows_cache[(da, db)]
        idx = np.clip(ks + dk, 0, None)
        factor = var ** e if e != 0 else 1.
        if b != 0:
            factor = factor * one_plus ** b
        result += c[:, None] * rows[idx] * factor
    return result


def _expand(system, ks, j, seed_e=0., seed_b=0.):
    terms = {(seed_e, seed_b, 0, 0, 0): np.ones(ks.size)}
    for _ in range(j):
        terms = _differentiate(system, terms, ks)
    logger.debug('Derivative of order %d of %s expands to %d terms.', j, system.family.value, len(terms))
    return terms


def _taylor_derivative_at_zero(alpha, ks, j):
    """j-th derivative at 0 of the analytic extension of φ_k^α (α + 1/2 = m ∈ ℕ), for each k in ``ks``.

    φ_k^α(u) = √2·c_k·u^m·L_k^α(u²)·e^{−u²/2}; all terms of the u²-Taylor coefficient of L_k^α·e^{−x/2} have the same
    sign, so the sum is free of cancellation.
    """
    m = int(round(alpha + 0.5))
    result = np.zeros(ks.size)
    if j < m or (j - m) % 2:
        return result
    i = (j - m) // 2
    kf = ks.astype(float)
    for a in range(i + 1):
        valid = ks >= a
        log_coef = (0.5 * special.gammaln(kf + 1) + 0.5 * special.gammaln(kf + alpha + 1)
                    - special.gammaln(np.where(valid, kf - a + 1, 1.)) - special.gammaln(alpha + a + 1))
        weight = (-1.) ** a / math.factorial(a) * (-0.5) ** (i - a) / math.factorial(i - a)
        result += np.where(valid, weight * np.exp(log_coef), 0.)
    return math.sqrt(2) * math.factorial(j) * result


def _fd_step(system, u):
    lo, hi = DomainBox.for_family(system.family).lower[0], DomainBox.for_family(system.family).upper[0]
    distance = np.minimum(u - lo, hi - u)
    return 1e-3 * np.minimum(1., distance / 4)


def _richardson(g, u, h):
    """First derivative of g at u: (4·D(h/2) − D(h))/3 with central differences D."""
    def central(step):
        return (g(u + step) - g(u - step)) / (2 * step)
    return (4 * central(h / 2) - central(h)) / 3


def _hermite_like_derivs(system, ks, j, u):
    """Derivative rows for the Laguerre and Jacobi families (u inside the domain, u > 0)."""
    if j == 0:
        return _rows_unchecked(system, int(ks.max()), u)[ks]
    return _evaluate_terms(system, _expand(system, ks, j), ks, u)


def _exact_derivs(system, ks, j, u):
    """Exact derivative matrix of shape (len(ks), len(u)), for j ≤ MAX_EXACT_ORDER."""
    family = system.family
    result = np.empty((ks.size, u.size))
    zero = u == 0
    if zero.any():
        if j == 0:
            result[:, zero] = _rows_unchecked(system, int(ks.max()), u[zero])[ks]
        elif not is_smooth_at_zero(system):
            raise DomainError(f'{family.value} functions are not differentiable at 0 for these parameters.')
        elif family is Family.LAGUERRE_HERMITE:
            result[:, zero] = _taylor_derivative_at_zero(system.a, ks, j)[:, None]
        else:
            result[:, zero] = _generalized_hermite_at_zero(system.a, ks, j)[:, None]
    inside = ~zero
    if inside.any():
        if family is Family.GENERALIZED_HERMITE:
            result[:, inside] = _generalized_hermite_derivs(system.a, ks, j, u[inside])
        else:
            result[:, inside] = _hermite_like_derivs(system, ks, j, u[inside])
    return result


def _generalized_hermite_at_zero(lam, ks, j):
    m = ks // 2
    odd = ks % 2 == 1
    even_vals = _taylor_derivative_at_zero(lam - 0.5, m, j)
    odd_vals = _taylor_derivative_at_zero(lam + 0.5, m, j)
    return (-1.) ** m * np.where(odd, odd_vals, even_vals) / math.sqrt(2)


def _generalized_hermite_derivs(lam, ks, j, u):
    """h_k^{(j)}(u) for u ≠ 0 from the Hermite-type derivatives at |u|."""
    m = ks // 2
    odd = ks % 2 == 1
    au = np.abs(u)
    s = np.sign(u)
    result = np.zeros((ks.size, u.size))
    for is_odd, alpha in ((False, lam - 0.5), (True, lam + 0.5)):
        sel = odd == is_odd
        if not sel.any():
            continue
        hermite = SystemSpec(Family.LAGUERRE_HERMITE, (alpha,))
        vals = _hermite_like_derivs(hermite, m[sel], j, au)
        sign = s ** (j + 1) if is_odd else s ** j
        result[sel] = ((-1.) ** m[sel])[:, None] * vals * sign[None, :] / math.sqrt(2)
    return result


def _deriv_matrix(system, ks, j, u):
    if j < 0:
        raise DomainError(f'Derivative order must be non-negative, got {j}.')
    if j > MAX_ORDER:
        raise UnsupportedOrderError(f'Derivatives of order {j} are not supported (maximum {MAX_ORDER}).')
    if j <= MAX_EXACT_ORDER:
        return _exact_derivs(system, ks, j, u)
    h = _fd_step(system, u)
    if np.any(h <= 0):
        raise DomainError(f'Derivatives of order {j} need points strictly inside the domain.')
    return _richardson(lambda x: _deriv_matrix(system, ks, j - 1, x), u, h)


def deriv_rows(system, kmax, j, u):
    """j-th derivatives of φ_0, …, φ_kmax at the points ``u``, shape (kmax + 1, len(u))."""
    system._require_1d()
    u = check_domain(system, np.atleast_1d(u)).ravel()
    return _deriv_matrix(system, np.arange(kmax + 1), j, u)


def eval_deriv_1d(system, k, j, u):
    """j-th derivative φ_k^{(j)}(u) of a one-dimensional system.

    Orders up to :data:`MAX_EXACT_ORDER` are exact (term expansion of the derivative recurrence); orders up to
    :data:`MAX_ORDER` use Richardson-extrapolated central differences of the exact order-4 derivative.
    """
    system._require_1d()
    u_arr = check_domain(system, np.atleast_1d(u)).ravel()
    values = _deriv_matrix(system, np.array([k]), j, u_arr)[0]
    return float(values[0]) if np.ndim(u) == 0 else values.reshape(np.shape(u))


def eval_weighted_deriv_1d(system, k, j, u, shift):
    """j-th derivative of φ_k(u)/w(u)^shift, with w(u) = u (Laguerre families) or w(θ) = sin(θ/2) (Jacobi).

    Used by the sign-and-size checks near the left endpoint.  Points must be strictly inside the domain.
    """
    system._require_1d()
    if system.family is Family.GENERALIZED_HERMITE:
        raise UnsupportedError('Weighted derivatives are defined for the Laguerre and Jacobi families only.')
    if j > MAX_EXACT_ORDER:
        raise UnsupportedOrderError(f'Weighted derivatives support order <= {MAX_EXACT_ORDER}, got {j}.')
    u_arr = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
    if np.any(u_arr <= 0):
        raise DomainError('Weighted derivatives need points strictly inside the domain.')
    u_arr = check_domain(system, u_arr)
    ks = np.array([k])
    if system.family is Family.JACOBI:
        # sin(θ/2)^{-a} = t^{-a}(1+t²)^{a/2}
        terms = _expand(system, ks, j, seed_e=-float(shift), seed_b=float(shift) / 2)
    else:
        terms = _expand(system, ks, j, seed_e=-float(shift))
    values = _evaluate_terms(system, terms, ks, u_arr)[0]
    return float(values[0]) if np.ndim(u) == 0 else values.reshape(np.shape(u))
