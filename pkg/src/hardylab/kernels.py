"""The kernels R_r(x, y) = Σ_n r^{|n|} φ_n(x) φ_n(y): closed forms, spectral sums and the heat kernel.

Closed forms exist for the Laguerre families (α ≥ −1/2) and for generalized Hermite functions.  They are evaluated
with all exponentials and the scaled Bessel factor e^{−z}I_α(z) merged into one exponent,

    −(1+r)/(2(1−r))·(u−v)² − (1−r)/(1+√r)²·uv,

so nothing overflows for large arguments.  Jacobi kernels only have the spectral path.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import bases, specfun
from .bases import Family, SystemSpec
from .framework.errors import DomainError, ShapeError, TruncationError, UnsupportedError
from .quadrature import PANEL_BUDGET, endpoint_exponent, integrate_adaptive

logger = logging.getLogger(__name__)

MAX_SPECTRAL_TERMS = 200000
_FD_RHO = {1: 1e-3, 2: 2e-3, 3: 5e-3}
_GAUSSIAN_CUT = math.log(1e18)


def _check_r(r):
    if not 0 < r < 1:
        raise DomainError(f'r must lie in (0, 1), got {r}.')


@dataclass(frozen=True)
class KernelQuery:
    """A kernel evaluation request R_r(x, y)."""

    system: SystemSpec
    r: float
    x: tuple
    y: tuple

    def __post_init__(self):
        _check_r(self.r)
        if len(self.x) != self.system.d or len(self.y) != self.system.d:
            raise ShapeError(f'Points must have {self.system.d} coordinates, got {self.x} and {self.y}.')
        for i in range(self.system.d):
            bases.check_domain(self.system.coordinate(i), np.array([self.x[i], self.y[i]], dtype=float))

    def value(self, tol=1e-12):
        return kernel_tensor(self.system, self.r, self.x, self.y, tol)


@dataclass(frozen=True)
class SpectralTruncation:
    """Cutoff K_max of a spectral sum and the tail estimate of :func:`spectral_tail_bound`."""

    K_max: int
    tail_bound: float

    def __post_init__(self):
        if self.K_max < 0 or not self.tail_bound >= 0:
            raise DomainError(f'Invalid truncation {self.K_max}, {self.tail_bound}.')


# Spectral sums -------------------------------------------------------------------------------------------------------

def tail_is_rigorous(system):
    """Whether :func:`spectral_tail_bound` is a proven bound: only standard Laguerre functions with α ≥ 0 have
    |φ_k| ≤ 1 uniformly."""
    return system.family is Family.LAGUERRE_STD and system.a >= 0


def _sup_constant(system, u):
    """Constant C(u) with |φ_k(u)| ≤ C(u)·decay(k)^{1/2}; ``u=None`` gives the value at u = 1.

    C = 1 is proven for standard Laguerre functions with α ≥ 0. Elsewhere the factor 2 is a heuristic
    constant without proof, and the tails built on it are estimates.
    """
    if tail_is_rigorous(system):
        return np.ones(1)
    if u is None:
        return np.full(1, 2.)
    u = np.abs(np.asarray(u, dtype=float))
    if system.family is Family.LAGUERRE_STD:
        with np.errstate(divide='ignore'):
            return 2 * np.maximum(1., u ** (system.a / 2))
    return np.full_like(u, 2.)


def _decay(system, k):
    """Decay of the squared sup-norm in k: (k+1)^{−1/6} for Hermite-type functions, 1 otherwise."""
    if system.family is Family.LAGUERRE_HERMITE:
        return (k + 1.) ** (-1 / 6)
    return 1.


def spectral_tail_bound(system, r, K_max, u=None, v=None, growth=0.):
    """Estimate of Σ_{k > K_max} r^k·(k+1)^growth·|φ_k(u)φ_k(v)|.

    Each term is taken as C(u)C(v)·decay(k)·(k+1)^growth·r^k and the tail as a geometric series from K_max + 1.
    It is a bound only where :func:`tail_is_rigorous` holds; see :func:`_sup_constant`.
    ``growth`` covers derivative sums, whose factors grow like a power of k.
    """
    _check_r(r)
    scale = float(np.max(_sup_constant(system, u) * _sup_constant(system, v))) * 2. ** growth
    k = K_max + 1
    q = r * ((k + 2.) / (k + 1.)) ** growth
    if q >= 1:
        return math.inf
    return scale * _decay(system, k) * (k + 1.) ** growth * r ** k / (1 - q)


def spectral_truncation(system, r, tol=1e-12, u=None, v=None, growth=0.):
    """Smallest K_max whose :func:`spectral_tail_bound` is at most ``tol``."""
    _check_r(r)
    K = max(0, int(math.log(tol * (1 - r)) / math.log(r)) - 1) if tol < 1 else 0
    K = max(0, K - 8)
    while spectral_tail_bound(system, r, K, u, v, growth) > tol:
        K += 1 if K < 64 else K // 16
        if K > MAX_SPECTRAL_TERMS:
            raise TruncationError(f'No spectral cutoff below {MAX_SPECTRAL_TERMS} reaches tail {tol} at r={r}.',
                                  spectral_tail_bound(system, r, MAX_SPECTRAL_TERMS, u, v, growth))
    logger.debug('Spectral truncation r=%g tol=%g: K_max=%d.', r, tol, K)
    return SpectralTruncation(K, spectral_tail_bound(system, r, K, u, v, growth))


def kernel_spectral(system, r, u, v, K_max=None, tol=1e-12):
    """Σ_{k ≤ K_max} r^k φ_k(u)φ_k(v) for a one-dimensional system.

    :param K_max: Cutoff; by default the smallest one reaching ``tol``.
    :raises TruncationError: if the tail bound of the given cutoff exceeds ``tol``.
    """
    system._require_1d()
    _check_r(r)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if K_max is None:
        trunc = spectral_truncation(system, r, tol, u, v)
    else:
        trunc = SpectralTruncation(int(K_max), spectral_tail_bound(system, r, int(K_max), u, v))
        if trunc.tail_bound > tol:
            raise TruncationError(f'Spectral tail bound {trunc.tail_bound:.3g} at K_max={K_max} exceeds {tol}.',
                                  trunc.tail_bound)
    weights = np.exp(np.arange(trunc.K_max + 1) * math.log(r))
    rows_u = bases.eval_rows(system, trunc.K_max, u.ravel())
    rows_v = bases.eval_rows(system, trunc.K_max, v.ravel())
    values = np.einsum('k,kn,kn->n', weights, rows_u, rows_v).reshape(u.shape)
    return float(values) if values.ndim == 0 else values


# Closed forms --------------------------------------------------------------------------------------------------------

def has_closed_form(system):
    """Closed forms exist for Hermite-type and generalized Hermite functions, and for ℒ_k^α with α ≥ −1/2."""
    if system.family is Family.JACOBI:
        return False
    if system.family is Family.LAGUERRE_STD:
        return all(a >= -0.5 for a in system.alpha)
    return True


def _hermite_closed(alpha, r, u, v):
    """Closed-form kernel of the Hermite-type functions φ_k^α, u, v ≥ 0."""
    uv = u * v
    sr = math.sqrt(r)
    exponent = -(1 + r) / (2 * (1 - r)) * (u - v) ** 2 - (1 - r) / (1 + sr) ** 2 * uv
    z = 2 * sr * uv / (1 - r)
    if alpha == -0.5:
        return 2 / (math.sqrt(math.pi) * math.sqrt(1 - r)) * np.exp(exponent) * (1 + np.exp(-2 * z)) / 2
    result = np.zeros(uv.shape)
    pos = uv > 0
    log_value = (math.log(2) + 0.5 * np.log(uv[pos]) - math.log(1 - r) - alpha / 2 * math.log(r) + exponent[pos]
                 + np.log(specfun.bessel_i_scaled(alpha, z[pos])))
    result[pos] = np.exp(log_value)
    return result


def kernel_closed_1d(system, r, u, v):
    """Closed-form kernel R_r(u, v) of a one-dimensional system.

    Standard Laguerre kernels come from the Hermite-type kernel by R(U, V) = R^H(√U, √V)/(2(UV)^{1/4}); generalized
    Hermite kernels are ½(R^{λ−½}_{r²}(|u|,|v|) + sgn(uv)·r·R^{λ+½}_{r²}(|u|,|v|)).

    :raises UnsupportedError: for Jacobi systems and for ℒ_k^α with α < −1/2.
    """
    system._require_1d()
    _check_r(r)
    if not has_closed_form(system):
        raise UnsupportedError(f'No closed-form kernel for {system.family.value} with these parameters; use the '
                               'spectral kernel.')
    scalar = np.ndim(u) == 0 and np.ndim(v) == 0
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    bases.check_domain(system, u)
    bases.check_domain(system, v)
    family = system.family
    if family is Family.LAGUERRE_HERMITE:
        values = _hermite_closed(system.a, r, u, v)
    elif family is Family.LAGUERRE_STD:
        su, sv = np.sqrt(u), np.sqrt(v)
        values = _hermite_closed(system.a, r, su, sv) / (2 * np.sqrt(su * sv))
    else:
        au, av = np.abs(u), np.abs(v)
        r2 = r * r
        values = 0.5 * (_hermite_closed(system.a - 0.5, r2, au, av)
                        + np.sign(u * v) * r * _hermite_closed(system.a + 0.5, r2, au, av))
    return float(values) if scalar else values


def kernel_1d(system, r, u, v, tol=1e-12):
    """Closed form when available, spectral sum otherwise."""
    if has_closed_form(system):
        return kernel_closed_1d(system, r, u, v)
    return kernel_spectral(system, r, u, v, tol=tol)


def kernel_tensor(system, r, x, y, tol=1e-12):
    """R_r(x, y) = Π_i R_r^{(i)}(x_i, y_i) for points of shape (d,) or (..., d)."""
    _check_r(r)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape[-1:] != (system.d,) or y.shape[-1:] != (system.d,):
        raise ShapeError(f'Points must have {system.d} coordinates, got shapes {x.shape} and {y.shape}.')
    value = 1.
    for i in range(system.d):
        value = value * kernel_1d(system.coordinate(i), r, x[..., i], y[..., i], tol)
    return value


# Heat kernel ---------------------------------------------------------------------------------------------------------

def _check_heat(system, t):
    if system.family is not Family.LAGUERRE_HERMITE:
        raise UnsupportedError(f'The heat kernel is implemented for Hermite-type Laguerre functions, not '
                               f'{system.family.value}.')
    if not t > 0:
        raise DomainError(f't must be positive, got {t}.')


def heat_kernel(system, t, x, y):
    """G_t(x, y) = e^{−2t(|α|+d)}·R_{e^{−4t}}(x, y), with |α| = α_1 + … + α_d."""
    _check_heat(system, t)
    scale = math.exp(-2 * t * (sum(float(a) for a in system.alpha) + system.d))
    return scale * kernel_tensor(system, math.exp(-4 * t), x, y)


def _log_sinh(x):
    return x + math.log1p(-math.exp(-2 * x)) - math.log(2)


def heat_kernel_explicit(system, t, x, y):
    """Π_i (sinh 2t)^{−1}·√(x_i y_i)·exp(−½coth(2t)(x_i² + y_i²))·I_{α_i}(x_i y_i / sinh 2t), stabilized."""
    _check_heat(system, t)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape[-1:] != (system.d,) or y.shape[-1:] != (system.d,):
        raise ShapeError(f'Points must have {system.d} coordinates, got shapes {x.shape} and {y.shape}.')
    coth = 1 / math.tanh(2 * t)
    log_sinh = _log_sinh(2 * t)
    value = 1.
    for i in range(system.d):
        alpha = float(system.alpha[i])
        xi, yi = x[..., i], y[..., i]
        xy = xi * yi
        exponent = -0.5 * coth * (xi - yi) ** 2 - xy * math.tanh(t)
        z = xy * math.exp(-log_sinh)
        if alpha == -0.5:
            factor = math.sqrt(2 / math.pi) * np.exp(exponent - 0.5 * log_sinh) * (1 + np.exp(-2 * z)) / 2
        else:
            factor = np.zeros(np.shape(xy))
            pos = xy > 0
            factor[pos] = np.exp(exponent[pos] - log_sinh + 0.5 * np.log(xy[pos])
                                 + np.log(specfun.bessel_i_scaled(alpha, z[pos])))
        value = value * factor
    return float(value) if np.ndim(value) == 0 else value


def _v_range(system, r, u):
    """Integration range in v for kernels centred at u, cut where the Gaussian factor drops below 1e-18."""
    width = math.sqrt(2 * (1 - r) / (1 + r) * _GAUSSIAN_CUT) + 1
    family = system.family
    if family is Family.LAGUERRE_STD:
        return [(0., (math.sqrt(u) + width) ** 2)]
    if family is Family.LAGUERRE_HERMITE:
        return [(0., abs(u) + width)]
    if family is Family.GENERALIZED_HERMITE:
        edge = abs(u) + width
        return [(-edge, 0.), (0., edge)]
    return [(0., math.pi)]


def _v_exponents(system, power):
    """Endpoint exponents (at 0 for the left piece, or at 0 from the right for the negative piece) of |R|^power."""
    sigma = endpoint_exponent(system) * power
    if system.family is Family.GENERALIZED_HERMITE:
        return [(None, sigma), (sigma, None)]
    if system.family is Family.JACOBI:
        return [(sigma, (system.b + 0.5) * power)]
    return [(sigma, None)]


def heat_decay_ratio(system, t, u_grid, abs_tol=1e-12, rel_tol=1e-10):
    """sup over ``u_grid`` of ∥G_t(u, ·)∥_{L²}·e^{2t(α+1)}, each norm by quadrature of the explicit kernel (d = 1)."""
    system._require_1d()
    _check_heat(system, t)
    r = math.exp(-4 * t)
    worst = 0.
    for u in np.atleast_1d(u_grid):
        total = 0.
        for (a, b), (left, right) in zip(_v_range(system, r, u), _v_exponents(system, 2)):
            result = integrate_adaptive(
                lambda v: heat_kernel_explicit(system, t, np.full((v.size, 1), u), v[:, None]) ** 2,
                a, b, abs_tol, rel_tol, left, right)
            total += result.value
        worst = max(worst, math.sqrt(total) * math.exp(2 * t * (system.a + 1)))
    return worst


# Kernel derivatives --------------------------------------------------------------------------------------------------

def fd_step(system, r, j, u):
    """Step for kernel derivatives: max(1e-5, ρ_j√(1−r)), ρ = 1e-3, 2e-3, 5e-3 for j = 1, 2, 3, kept inside the domain."""
    h = max(1e-5, _FD_RHO[j] * math.sqrt(1 - r))
    box = bases.DomainBox.for_family(system.family)
    room = min(u - box.lower[0], box.upper[0] - u) / 3
    if room <= 0:
        raise DomainError(f'Kernel derivatives need u strictly inside the domain, got {u}.')
    return min(h, room)


def _stencil(f, u, h, j):
    if j == 1:
        return (f(u + h) - f(u - h)) / (2 * h)
    if j == 2:
        return (f(u + h) - 2 * f(u) + f(u - h)) / h ** 2
    return (f(u + 2 * h) - 2 * f(u + h) + 2 * f(u - h) - f(u - 2 * h)) / (2 * h ** 3)


def kernel_deriv(system, r, j, u, v, method=None, tol=1e-12):
    """∂_u^j R_r(u, v) at a scalar u and points v.

    :param method: ``'fd'`` (Richardson-extrapolated central differences of the closed form) or ``'spectral'``
      (Σ r^k φ_k^{(j)}(u)φ_k(v)); default ``'fd'`` when a closed form exists.
    """
    system._require_1d()
    _check_r(r)
    if not 0 <= j <= 3:
        raise DomainError(f'Kernel derivatives are supported for j <= 3, got {j}.')
    method = method or ('fd' if has_closed_form(system) else 'spectral')
    v = np.asarray(v, dtype=float)
    if method == 'spectral':
        trunc = spectral_truncation(system, r, tol, u, v, growth=j)
        weights = np.exp(np.arange(trunc.K_max + 1) * math.log(r))
        derivs = bases.deriv_rows(system, trunc.K_max, j, u)[:, 0]
        rows_v = bases.eval_rows(system, trunc.K_max, v.ravel())
        values = ((weights * derivs) @ rows_v).reshape(v.shape)
    elif method == 'fd':
        if j == 0:
            values = kernel_closed_1d(system, r, np.full(v.shape, u), v)
        else:
            h = fd_step(system, r, j, u)

            def f(x):
                return kernel_closed_1d(system, r, np.full(v.shape, x), v)

            values = (4 * _stencil(f, u, h / 2, j) - _stencil(f, u, h, j)) / 3
    else:
        raise DomainError(f'Unknown kernel derivative method {method!r}.')
    return float(values) if np.ndim(values) == 0 else values


def kernel_deriv_l2(system, r, j, u, abs_tol=1e-12, rel_tol=1e-10, method=None, panel_budget=PANEL_BUDGET):
    """∥∂_u^j R_r(u, ·)∥_{L²} of a one-dimensional system.

    The finite-difference path integrates the squared derivative over v by adaptive quadrature; the spectral path
    uses Parseval, (Σ r^{2k}φ_k^{(j)}(u)²)^{1/2}.
    """
    system._require_1d()
    _check_r(r)
    method = method or ('fd' if has_closed_form(system) else 'spectral')
    if method == 'spectral':
        trunc = spectral_truncation(system, r * r, abs_tol, u, u, growth=2 * j)
        weights = np.exp(np.arange(trunc.K_max + 1) * 2 * math.log(r))
        derivs = bases.deriv_rows(system, trunc.K_max, j, u)[:, 0]
        return math.sqrt(float(np.sum(weights * derivs ** 2)))
    total = 0.
    for (a, b), (left, right) in zip(_v_range(system, r, u), _v_exponents(system, 2)):
        panels = 1 + math.ceil((b - a) / math.sqrt(1 - r))
        result = integrate_adaptive(lambda v: kernel_deriv(system, r, j, u, v, method='fd') ** 2, a, b, abs_tol,
                                    rel_tol, left, right, min_panels=panels, panel_budget=panel_budget)
        total += result.value
    logger.debug('Kernel derivative norm j=%d r=%g u=%g: %.6g', j, r, u, math.sqrt(total))
    return math.sqrt(total)
