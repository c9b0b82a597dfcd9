"""Numerical checks of the asymptotic estimates behind the Hardy inequalities.

Every check evaluates the ratio of a computed quantity to its predicted bound on a sample grid.  A bound "≲" is taken
to hold when the worst ratio stays finite and grows by less than a factor 2 when the grid is doubled in range (k → 2k,
or 1 − r → (1 − r)/2); absolute constants are reported, never asserted.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np
import pandas as pd
from scipy import stats

from . import bases, kernels
from .bases import Family
from .framework.errors import DomainError, ShapeError, UnsupportedError
from .hardy import gamma_for
from .quadrature import integrate_adaptive

logger = logging.getLogger(__name__)

STABILITY_FACTOR = 2.  #: Allowed growth of the worst ratio under grid doubling.
SIGN_SIZE_C_GRID = (1 / 2, 1 / 4, 1 / 8, 1 / 16)
PARSEVAL_TOL = 1e-18
MAX_TENSOR_TERMS = 20_000_000


@dataclass(frozen=True)
class EstimateCheck:
    """Outcome of one check.

    :param name: Check identifier.
    :param sample_grid: Human-readable description of the sample grid.
    :param worst_ratio: Largest ratio (or bracket spread) over the base grid.
    :param passed: Stability verdict.
    :param table: Per-point values.
    :param extra: Further numbers, e.g. the ratio on the doubled grid or a fitted slope.
    """

    name: str
    sample_grid: str
    worst_ratio: float
    passed: bool
    table: pd.DataFrame = field(default=None, compare=False)
    extra: dict = field(default_factory=dict, compare=False)

    def summary(self):
        return {'name': self.name, 'sample_grid': self.sample_grid, 'worst_ratio': self.worst_ratio,
                'passed': self.passed, **self.extra}


def _doubled(grid):
    grid = sorted(set(int(k) for k in grid))
    return grid, sorted(set(grid) | {2 * k for k in grid})


def _stable(base, extended):
    if not (math.isfinite(base) and math.isfinite(extended)):
        return False
    if base == 0:
        return extended == 0
    return extended < STABILITY_FACTOR * base


def _one_d(system):
    system._require_1d()
    return system


# Regime bounds -------------------------------------------------------------------------------------------------------

def laguerre_regime_bound(k, alpha, u):
    """Four-regime bound of |ℒ_k^α(u)| in terms of k′ = max(4k + 2α + 2, 2); the last regime decays like e^{−u/20}."""
    kp = float(bases.k_prime(k, alpha))
    u = np.asarray(u, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        small = (u * kp) ** (alpha / 2)
        middle = (u * kp) ** -0.25
        turning = kp ** -0.25 * (kp ** (1 / 3) + np.abs(kp - u)) ** -0.25
        far = np.exp(-0.05 * u)
    return np.select([u <= 1 / kp, u <= kp / 2, u <= 1.5 * kp], [small, middle, turning], far)


def jacobi_regime_bound(k, alpha, beta, theta):
    """Three-regime bound of |φ_k^{α,β}(θ)|: ((k+1)θ)^{α+½}, 1, ((k+1)(π−θ))^{β+½}."""
    theta = np.asarray(theta, dtype=float)
    n = k + 1.
    left = (n * theta) ** (alpha + 0.5)
    right = (n * (np.pi - theta)) ** (beta + 0.5)
    return np.select([theta <= 1 / n, theta >= np.pi - 1 / n], [left, right], 1.)


def _regime_grid(system, k):
    if system.family is Family.JACOBI:
        side = np.geomspace(1e-3 / (k + 1), np.pi / 2, 100)
        return np.unique(np.concatenate([side, np.pi - side]))
    kp = float(bases.k_prime(k, system.a))
    if system.family is Family.LAGUERRE_STD:
        return np.geomspace(1e-3 / kp, 3 * kp, 200)
    edge = math.sqrt(3 * kp) + 3
    return np.linspace(edge / 400, edge, 400) if system.family is Family.LAGUERRE_HERMITE else \
        np.linspace(-edge, edge, 801)


def _regime_rows(system, k, u_grid):
    u = _regime_grid(system, k) if u_grid is None else np.asarray(u_grid, dtype=float)
    values = np.abs(bases.eval_1d(system, k, u))
    if system.family is Family.LAGUERRE_STD:
        ratios = values / laguerre_regime_bound(k, system.a, u)
    elif system.family is Family.JACOBI:
        ratios = values / jacobi_regime_bound(k, system.a, system.b, u)
    else:
        # sup-norm decay (k+1)^{-1/12}: one ratio per k
        i = int(np.argmax(values))
        return pd.DataFrame({'k': [k], 'u': [u[i]], 'value': [values[i]],
                             'ratio': [values[i] * (k + 1.) ** (1 / 12)]})
    return pd.DataFrame({'k': k, 'u': u, 'value': values, 'ratio': ratios})


def check_regime_bounds(system, k_grid, u_grid=None):
    """Regime bounds of |φ_k(u)|: four regimes for ℒ_k^α, three for Jacobi, the sup-norm decay for Hermite types.

    :param u_grid: Sample points; by default a grid adapted to each k.
    """
    system = _one_d(system)
    base, extended = _doubled(k_grid)
    table = pd.concat([_regime_rows(system, k, u_grid) for k in extended], ignore_index=True)
    w1 = float(table[table['k'].isin(base)]['ratio'].max())
    w2 = float(table['ratio'].max())
    logger.debug('Regime bounds %s: worst %.4g, doubled %.4g.', system.family.value, w1, w2)
    return EstimateCheck('regime', f'k in {base} (doubled to {extended[-1]})', w1, _stable(w1, w2), table,
                         {'worst_ratio_doubled': w2})


# Sign and size near the left endpoint ---------------------------------------------------------------------------------

def _sign_size_scale(system, k):
    return (k + 1.) ** -0.5 if system.family is Family.LAGUERRE_HERMITE else 1 / (k + 1.)


def predicted_sign_size(system, j, ell, k, u):
    """Predicted sign and size of d^j/du^j[φ_k(u)/w(u)^{σ−ℓ}], σ the endpoint exponent of the family.

    :return: (sign, size array).
    """
    family = system.family
    n = k + 1.
    base_power = system.a + 0.5 if family is Family.JACOBI else system.a / 2
    if ell >= j:
        return 1, n ** base_power * u ** (ell - j)
    gap = j - ell
    if family is Family.LAGUERRE_STD:
        return (-1) ** gap, n ** (base_power + gap) * np.ones_like(u)
    half = math.ceil(gap / 2)
    if family is Family.LAGUERRE_HERMITE:
        return (-1) ** half, n ** (base_power + half) * u ** ((1 - (-1) ** gap) / 2)
    return (-1) ** half, n ** (base_power + 2 * half) * u ** ((1 - (-1) ** gap) / 2)


def _shift(system, ell):
    if system.family is Family.LAGUERRE_STD:
        return system.a / 2 - ell
    return system.a + 0.5 - ell


def _sign_size_rows(system, j, ell, k, c):
    scale = _sign_size_scale(system, k)
    u = np.geomspace(1e-2 * c * scale, c * scale, 40)
    values = bases.eval_weighted_deriv_1d(system, k, j, u, _shift(system, ell))
    sign, size = predicted_sign_size(system, j, ell, k, u)
    return pd.DataFrame({'k': k, 'c': c, 'u': u, 'value': values, 'sign_ok': np.sign(values) == sign,
                         'ratio': values * sign / size})


def check_sign_size(system, j, ell, K_grid, c_grid=SIGN_SIZE_C_GRID):
    """Sign and two-sided size of scaled derivatives on (0, c·scale(k)).

    The largest c in ``c_grid`` with the predicted sign at every point of the doubled grid is reported; the bracket
    spread max/min of value/size at that c must grow by less than the stability factor under k-doubling.
    """
    system = _one_d(system)
    if system.family is Family.GENERALIZED_HERMITE:
        raise UnsupportedError('Sign-size checks are defined for the Laguerre and Jacobi families.')
    if not (0 <= j <= 3 and ell >= 0):
        raise DomainError(f'Need 0 <= j <= 3 and ell >= 0, got j={j}, ell={ell}.')
    base, extended = _doubled(K_grid)
    for c in sorted(c_grid, reverse=True):
        table = pd.concat([_sign_size_rows(system, j, ell, k, c) for k in extended], ignore_index=True)
        if table['sign_ok'].all():
            break
    else:
        return EstimateCheck('sign-size', f'k in {base}, c in {list(c_grid)}', math.inf, False, table,
                             {'c': None})
    in_base = table[table['k'].isin(base)]['ratio']
    w1 = float(in_base.max() / in_base.min())
    w2 = float(table['ratio'].max() / table['ratio'].min())
    return EstimateCheck('sign-size', f'k in {base}, u in (c/100, c)*scale(k)', w1, _stable(w1, w2), table,
                         {'c': c, 'spread_doubled': w2, 'ratio_min': float(table['ratio'].min()),
                          'ratio_max': float(table['ratio'].max())})


# Derivative sup norms ------------------------------------------------------------------------------------------------

def _derivative_power(system, j):
    if system.family is Family.LAGUERRE_HERMITE:
        return (6 * j - 1) / 12
    return float(j)


def _sup_grid(system, k):
    points = 400 + 4 * k
    if system.family is Family.LAGUERRE_STD:
        U = 3 * float(bases.k_prime(k, system.a))
        return U * np.linspace(1 / points, 1, points) ** 2
    if system.family is Family.LAGUERRE_HERMITE:
        return np.linspace(0.5, math.sqrt(3 * float(bases.k_prime(k, system.a))) + 3, points)
    return np.linspace(1e-2 / (k + 1), 2 * np.pi / 3, points)


def check_derivative_sup(system, j, k_grid):
    """sup |φ_k^{(j)}| against (k+1)^j (ℒ_k^α, and Jacobi on (0, 2π/3)) or (k+1)^{(6j−1)/12} (Hermite type on (½, ∞))."""
    system = _one_d(system)
    family = system.family
    if family is Family.GENERALIZED_HERMITE:
        raise UnsupportedError('Derivative sup checks are defined for the Laguerre and Jacobi families.')
    if family is Family.LAGUERRE_STD:
        a = system.a
        if not (a > 2 * j or (a >= 0 and float(a).is_integer() and int(a) % 2 == 0)):
            raise DomainError(f'The bound needs alpha in {{0, 2, ..., {2 * j}}} or alpha > {2 * j}, got {a}.')
    base, extended = _doubled(k_grid)
    power = _derivative_power(system, j)
    rows = []
    for k in extended:
        u = _sup_grid(system, k)
        values = np.abs(bases.eval_deriv_1d(system, k, j, u))
        i = int(np.argmax(values))
        rows.append({'k': k, 'u_max': u[i], 'sup': values[i], 'ratio': values[i] / (k + 1.) ** power})
    table = pd.DataFrame(rows)
    w1 = float(table[table['k'].isin(base)]['ratio'].max())
    w2 = float(table['ratio'].max())
    return EstimateCheck('deriv-sup', f'k in {base}, j={j}, power {power:.4g}', w1, _stable(w1, w2), table,
                         {'worst_ratio_doubled': w2, 'power': power})


# Hölder moduli -------------------------------------------------------------------------------------------------------

DEFAULT_HOLDER_U = tuple(np.geomspace(1e-3, 0.9, 8))
DEFAULT_HOLDER_H = (1e-4, 1e-3, 1e-2, 1e-1)


def holder_bound(system, j, k, h):
    """Two-term bound of |φ_k^{(j)}(u) − φ_k^{(j)}(u+h)|."""
    a, n, h = system.a, k + 1., np.abs(h)
    if system.family is Family.LAGUERRE_STD:
        if not 2 * j < a < 2 * j + 2:
            raise DomainError(f'The modulus bound needs alpha in ({2 * j}, {2 * j + 2}), got {a}.')
        return n ** (j + 1) * h + n ** (a / 2) * h ** (a / 2 - j)
    if not j - 0.5 < a <= j + 0.5:
        raise DomainError(f'The modulus bound needs alpha in ({j - 0.5}, {j + 0.5}], got {a}.')
    if system.family is Family.LAGUERRE_HERMITE:
        return n ** ((2 * j + 1) / 4) * h + n ** (a / 2) * h ** (a + 0.5 - j)
    if system.family is Family.JACOBI:
        return n ** (j + 1) * h + n ** (a + 0.5) * h ** (a + 0.5 - j)
    raise UnsupportedError('Modulus checks are defined for the Laguerre and Jacobi families.')


def _pairs(pairs):
    if pairs is None:
        pairs = [(u, u + h) for u in DEFAULT_HOLDER_U for h in DEFAULT_HOLDER_H]
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ShapeError(f'Pairs must have shape (n, 2), got {pairs.shape}.')
    return pairs


def check_holder_modulus(system, j, k_grid, pairs=None):
    """|φ_k^{(j)}(u) − φ_k^{(j)}(u′)| against the two-term modulus bound, worst case over the pairs."""
    system = _one_d(system)
    pairs = _pairs(pairs)
    base, extended = _doubled(k_grid)
    rows = []
    for k in extended:
        left = bases.eval_deriv_1d(system, k, j, pairs[:, 0])
        right = bases.eval_deriv_1d(system, k, j, pairs[:, 1])
        h = pairs[:, 1] - pairs[:, 0]
        bound = holder_bound(system, j, k, h)
        rows.append(pd.DataFrame({'k': k, 'u': pairs[:, 0], 'u_prime': pairs[:, 1],
                                  'difference': np.abs(left - right), 'bound': bound,
                                  'ratio': np.abs(left - right) / bound}))
    table = pd.concat(rows, ignore_index=True)
    w1 = float(table[table['k'].isin(base)]['ratio'].max())
    w2 = float(table['ratio'].max())
    return EstimateCheck('holder', f'k in {base}, {len(pairs)} pairs', w1, _stable(w1, w2), table,
                         {'worst_ratio_doubled': w2})


def _doubled_r(r_grid):
    base = sorted(set(float(r) for r in r_grid))
    for r in base:
        kernels._check_r(r)
    return base, sorted(set(base) | {1 - (1 - r) / 2 for r in base})


def _parseval_order(r, k):
    """Smallest M with r^{2M}(M+1)^{2k+4} ≤ 1e-18."""
    M = 1
    while 2 * M * math.log(r) + (2 * k + 4) * math.log(M + 1) > math.log(PARSEVAL_TOL):
        M = M + 1 if M < 64 else M + M // 16
    return M


def kernel_holder_bound(system, j, r, h):
    """(1−r)^{−(2j+3)/4}|h| + (1−r)^{−(α+1)/2}|h|^{α+½−j} for Hermite-type systems.

    Both powers of 1 − r are negative: the bound blows up as r → 1.
    """
    if system.family is not Family.LAGUERRE_HERMITE:
        raise UnsupportedError('The kernel modulus check is defined for Hermite-type Laguerre functions.')
    a, h = system.a, np.abs(h)
    if not j - 0.5 < a <= j + 0.5:
        raise DomainError(f'The kernel modulus bound needs alpha in ({j - 0.5}, {j + 0.5}], got {a}.')
    return (1 - r) ** (-(2 * j + 3) / 4) * h + (1 - r) ** (-(a + 1) / 2) * h ** (a + 0.5 - j)


def check_kernel_holder(system, j, r_grid, pairs=None):
    """∥∂^jR_r(u, ·) − ∂^jR_r(u′, ·)∥_{L²} against :func:`kernel_holder_bound`.

    Hermite-type systems only; the norm is computed by Parseval.
    """
    system = _one_d(system)
    kernel_holder_bound(system, j, 0.5, 1.)  # family and alpha range
    pairs = _pairs(pairs)
    base, extended = _doubled_r(r_grid)
    rows = []
    for r in extended:
        M = _parseval_order(r, j)
        weights = r ** (2 * np.arange(M + 1))
        left = bases.deriv_rows(system, M, j, pairs[:, 0])
        right = bases.deriv_rows(system, M, j, pairs[:, 1])
        lhs = np.sqrt(np.einsum('k,kn->n', weights, (left - right) ** 2))
        bound = kernel_holder_bound(system, j, r, pairs[:, 1] - pairs[:, 0])
        rows.append(pd.DataFrame({'r': r, 'u': pairs[:, 0], 'u_prime': pairs[:, 1], 'lhs': lhs, 'bound': bound,
                                  'ratio': lhs / bound}))
    table = pd.concat(rows, ignore_index=True)
    w1 = float(table[table['r'].isin(base)]['ratio'].max())
    w2 = float(table['ratio'].max())
    return EstimateCheck('kernel-holder', f'r in {base}, {len(pairs)} pairs', w1, _stable(w1, w2), table,
                         {'worst_ratio_doubled': w2})


# Condition (C) ---------------------------------------------------------------------------------------------------------

def delta_set(system, k):
    """{1} together with the fractional parts that fall in (0, 1): α_i/2 − k (standard Laguerre), α_i + ½ − k
    (Hermite type), λ_i − k (generalized Hermite), α_i + ½ − k and β_i + ½ − k (Jacobi)."""
    family = system.family
    if family is Family.LAGUERRE_STD:
        candidates = [float(a) / 2 - k for a in system.alpha]
    elif family is Family.LAGUERRE_HERMITE:
        candidates = [float(a) + 0.5 - k for a in system.alpha]
    elif family is Family.GENERALIZED_HERMITE:
        candidates = [float(v) - k for v in system.lam]
    else:
        candidates = [float(a) + 0.5 - k for a in system.alpha] + [float(b) + 0.5 - k for b in system.beta]
    return sorted({1.} | {c for c in candidates if 0 < c < 1})


def cond_c_rhs(system, k, r, distance):
    """Σ_{δ∈Δ} (1−r)^{−(d+2k+2δ)γ}|x−x′|^{k+δ}."""
    gamma = float(gamma_for(system))
    return sum((1 - r) ** (-(system.d + 2 * k + 2 * delta) * gamma) * distance ** (k + delta)
               for delta in delta_set(system, k))


def _taylor_lhs_parseval(system, k, r, x, x_prime):
    """∥R_r(x, ·) − Taylor_k[R_r(·, ·)](x′)∥_{L²} by Parseval over the tensor basis."""
    M = _parseval_order(r, k)
    if (M + 1) ** system.d > MAX_TENSOR_TERMS:
        raise DomainError(f'Condition (C) at r={r} needs {(M + 1) ** system.d} tensor terms; reduce r or d.')
    h = x - x_prime
    values, derivs = [], []
    for i in range(system.d):
        coordinate = system.coordinate(i)
        values.append(bases.eval_rows(coordinate, M, x[i:i + 1])[:, 0])
        derivs.append([bases.deriv_rows(coordinate, M, m, x_prime[i:i + 1])[:, 0] * h[i] ** m / math.factorial(m)
                       for m in range(k + 1)])
    residual = reduce(np.multiply.outer, values)
    for m in product(range(k + 1), repeat=system.d):
        if sum(m) <= k:
            residual = residual - reduce(np.multiply.outer, [derivs[i][m[i]] for i in range(system.d)])
    weights = reduce(np.multiply.outer, [r ** (2 * np.arange(M + 1))] * system.d)
    return math.sqrt(float(np.sum(weights * residual ** 2)))


def _taylor_lhs_quadrature(system, k, r, x, x_prime, abs_tol, rel_tol):
    if system.d != 1 or not kernels.has_closed_form(system):
        raise UnsupportedError('The quadrature method needs a one-dimensional system with a closed-form kernel.')
    if k > 3:
        raise UnsupportedError('The quadrature method supports Taylor orders up to 3.')
    u, u_prime = float(x[0]), float(x_prime[0])
    h = u - u_prime

    def integrand(v):
        remainder = kernels.kernel_closed_1d(system, r, np.full(v.shape, u), v)
        for m in range(k + 1):
            remainder = remainder - kernels.kernel_deriv(system, r, m, u_prime, v) * h ** m / math.factorial(m)
        return remainder ** 2

    total = 0.
    for (a, b), (left, right) in zip(kernels._v_range(system, r, max(u, u_prime)), kernels._v_exponents(system, 2)):
        total += integrate_adaptive(integrand, a, b, abs_tol, rel_tol, left, right,
                                    min_panels=1 + math.ceil((b - a) / math.sqrt(1 - r))).value
    return math.sqrt(max(total, 0.))


def check_cond_c(system, k, r_grid, pairs, method='parseval', abs_tol=1e-14, rel_tol=1e-10):
    """Taylor remainder of the kernel against the condition (C) right-hand side.

    :param k: Taylor order.
    :param r_grid: Values of r in [0.5, 0.99].
    :param pairs: Sequence of (x, x′) with points of d coordinates and |x − x′| ≤ 1/2.
    :param method: ``'parseval'`` (any family and dimension) or ``'quadrature'`` (d = 1 closed-form kernels).
    """
    base, extended = _doubled_r(r_grid)
    points = []
    for x, x_prime in pairs:
        x, x_prime = np.atleast_1d(np.asarray(x, dtype=float)), np.atleast_1d(np.asarray(x_prime, dtype=float))
        if x.shape != (system.d,) or x_prime.shape != (system.d,):
            raise ShapeError(f'Points must have {system.d} coordinates, got {x} and {x_prime}.')
        if np.linalg.norm(x - x_prime) > 0.5:
            raise DomainError(f'Condition (C) needs |x - x\'| <= 1/2, got {np.linalg.norm(x - x_prime)}.')
        points.append((x, x_prime))
    rows = []
    for r in extended:
        for n, (x, x_prime) in enumerate(points):
            if method == 'parseval':
                lhs = _taylor_lhs_parseval(system, k, r, x, x_prime)
            elif method == 'quadrature':
                lhs = _taylor_lhs_quadrature(system, k, r, x, x_prime, abs_tol, rel_tol)
            else:
                raise DomainError(f'Unknown method {method!r}.')
            distance = float(np.linalg.norm(x - x_prime))
            rhs = cond_c_rhs(system, k, r, distance)
            rows.append({'pair': n, 'r': r, 'distance': distance, 'lhs': lhs, 'rhs': rhs,
                         'ratio': lhs / rhs if rhs > 0 else 0.})
    table = pd.DataFrame(rows)
    w1 = float(table[table['r'].isin(base)]['ratio'].max())
    w2 = float(table['ratio'].max())

    gamma = float(gamma_for(system))
    predicted = -(system.d + 2 * k + 2 * min(delta_set(system, k))) * gamma
    slopes = {}
    for n, group in table.groupby('pair'):
        group = group[(group['distance'] > 0) & (group['lhs'] > 0)]
        if len(group) >= 2:
            slopes[int(n)] = float(stats.linregress(np.log(1 - group['r']), np.log(group['lhs'])).slope)
    ratios = table['ratio'][table['ratio'] > 0]
    spread = float(ratios.max() / ratios.min()) if len(ratios) else 0.
    logger.debug('Condition (C) k=%d: worst %.4g, slopes %s, predicted %.4g.', k, w1, slopes, predicted)
    return EstimateCheck('cond-c', f'r in {base}, {len(points)} pairs, {method}', w1, _stable(w1, w2), table,
                         {'worst_ratio_doubled': w2, 'fitted_slopes': slopes, 'predicted_slope': predicted,
                          'ratio_spread': spread, 'delta_set': delta_set(system, k)})
