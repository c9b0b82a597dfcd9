"""Scalar special functions: log-gamma, Laguerre and Jacobi polynomials, and the scaled modified Bessel function.

All functions accept numpy arrays for their real argument and return an array of the same shape, or a float for scalar
input.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, special

from .framework.errors import DomainError, ToleranceError

logger = logging.getLogger(__name__)

SERIES_MIN_SWITCH = 30.  #: The series branch is used at least up to this argument.
_ASYMPTOTIC_MAX_TERMS = 80


def _as_output(value, like):
    """Return a float when ``like`` is a scalar, else the array."""
    if np.ndim(like) == 0:
        return float(np.asarray(value).reshape(()))
    return value


def log_gamma(u):
    """ln Γ(u) for u > 0."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(~(u_arr > 0)):
        raise DomainError(f'log_gamma needs a positive argument, got {u}.')
    return _as_output(special.gammaln(u_arr), u)


def laguerre_poly(k, alpha, u):
    """Laguerre polynomial L_k^α(u) by the three-term recurrence.

    :param k: Degree.
    :param alpha: Type parameter, α > −1.
    :param u: Argument (scalar or array).
    """
    if not alpha > -1:
        raise DomainError(f'Laguerre polynomials need alpha > -1, got {alpha}.')
    if k < 0:
        raise DomainError(f'Degree must be non-negative, got {k}.')
    u_arr = np.asarray(u, dtype=float)
    prev = np.ones_like(u_arr)
    if k == 0:
        return _as_output(prev, u)
    cur = 1. + alpha - u_arr
    for n in range(1, k):
        prev, cur = cur, ((2 * n + 1 + alpha - u_arr) * cur - (n + alpha) * prev) / (n + 1)
    return _as_output(cur, u)


def jacobi_poly(k, alpha, beta, x):
    """Jacobi polynomial P_k^{(α,β)}(x) by the three-term recurrence, for α, β > −1."""
    if not (alpha > -1 and beta > -1):
        raise DomainError(f'Jacobi polynomials need alpha, beta > -1, got ({alpha}, {beta}).')
    if k < 0:
        raise DomainError(f'Degree must be non-negative, got {k}.')
    x_arr = np.asarray(x, dtype=float)
    prev = np.ones_like(x_arr)
    if k == 0:
        return _as_output(prev, x)
    ab = alpha + beta
    cur = (alpha + 1) + (ab + 2) * (x_arr - 1) / 2
    for n in range(1, k):
        c = 2 * n + ab
        a1 = 2 * (n + 1) * (n + ab + 1) * c
        a2 = (c + 1) * (alpha ** 2 - beta ** 2)
        a3 = (c + 1) * (c + 2) * c
        a4 = 2 * (n + alpha) * (n + beta) * (c + 2)
        prev, cur = cur, ((a2 + a3 * x_arr) * cur - a4 * prev) / a1
    return _as_output(cur, x)


class BesselMode(Enum):
    """Evaluation branch for the modified Bessel function."""

    SERIES = 'series'
    ASYMPTOTIC = 'asymptotic'
    INTEGRAL = 'integral-oracle'


@dataclass(frozen=True)
class BesselEvalMode:
    """Branch selection for :func:`bessel_i_scaled`.

    :param mode: Branch used.
    :param switch_threshold: Argument above which the asymptotic branch is used.
    """

    mode: BesselMode
    switch_threshold: float

    def __post_init__(self):
        if not self.switch_threshold > 0:
            raise DomainError(f'Bessel switch threshold must be positive, got {self.switch_threshold}.')


def bessel_switch_threshold(nu):
    """Series below max(30, 2ν²), asymptotic expansion above."""
    return max(SERIES_MIN_SWITCH, 2. * nu * nu)


def bessel_eval_mode(nu, z):
    """Branch :func:`bessel_i_scaled` uses at a scalar argument ``z``."""
    threshold = bessel_switch_threshold(nu)
    return BesselEvalMode(BesselMode.SERIES if z < threshold else BesselMode.ASYMPTOTIC, threshold)


def _check_bessel_args(nu, z):
    if not nu >= -0.5:
        raise DomainError(f'Modified Bessel function is supported for nu >= -1/2 only, got {nu}.')
    if np.any(~(np.asarray(z) >= 0)):
        raise DomainError('Modified Bessel function needs z >= 0.')


def _value_at_zero(nu):
    if nu == 0:
        return 1.
    return 0. if nu > 0 else np.inf


def _series_scaled(nu, z):
    """e^{−z}I_ν(z) from the power series, summed in log space.  ``z`` is a positive 1-d array."""
    m_max = int(np.ceil(z.max() / 2 + 10 * np.sqrt(z.max()) + 40))
    m = np.arange(m_max + 1, dtype=float)[:, None]
    log_terms = ((2 * m + nu) * np.log(z / 2)[None, :] - special.gammaln(m + 1) - special.gammaln(m + nu + 1))
    return np.exp(special.logsumexp(log_terms, axis=0) - z)


def _asymptotic_scaled(nu, z):
    """e^{−z}I_ν(z) from the large-argument expansion, truncated at its smallest term.  ``z`` positive 1-d array."""
    mu = 4. * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_MAX_TERMS):
        new_term = -term * (mu - (2 * k - 1) ** 2) / (8. * k * z)
        # stop where the expansion starts to diverge or has converged
        active &= np.abs(new_term) < np.abs(term)
        total = np.where(active, total + new_term, total)
        term = np.where(active, new_term, term)
        active &= np.abs(term) > 1e-17 * np.abs(total)
        if not active.any():
            break
    return total / np.sqrt(2 * np.pi * z)


def bessel_i_scaled(nu, z, mode=None):
    """Scaled modified Bessel function e^{−z}·I_ν(z) for ν ≥ −1/2, z ≥ 0.

    :param nu: Order.
    :param z: Argument, scalar or array.
    :param mode: Optional :obj:`BesselMode` forcing one branch; by default the series is used below
      :func:`bessel_switch_threshold` and the asymptotic expansion above.
    """
    z_arr = np.asarray(z, dtype=float)
    _check_bessel_args(nu, z_arr)
    flat = z_arr.ravel()
    result = np.empty_like(flat)
    zero = flat == 0
    result[zero] = _value_at_zero(nu)

    if mode is BesselMode.INTEGRAL:
        result[~zero] = [bessel_i_integral(nu, x, scaled=True) for x in flat[~zero]]
        return _as_output(result.reshape(z_arr.shape), z)

    threshold = bessel_switch_threshold(nu)
    if mode is None:
        use_series = ~zero & (flat < threshold)
        use_asymptotic = ~zero & (flat >= threshold)
    elif mode is BesselMode.SERIES:
        use_series, use_asymptotic = ~zero, np.zeros_like(zero)
    else:
        use_series, use_asymptotic = np.zeros_like(zero), ~zero
    if use_series.any():
        result[use_series] = _series_scaled(nu, flat[use_series])
    if use_asymptotic.any():
        result[use_asymptotic] = _asymptotic_scaled(nu, flat[use_asymptotic])
    return _as_output(result.reshape(z_arr.shape), z)


def _quad(f, a, b, rel_tol, **kwargs):
    result = integrate.quad(f, a, b, epsabs=0., epsrel=rel_tol, limit=400, full_output=1, **kwargs)
    if len(result) > 3:
        raise ToleranceError(f'Bessel integral oracle did not converge: {result[3]}', value=result[0],
                             estimate=result[1])
    return result[0]


def bessel_i_integral(nu, z, scaled=False, rel_tol=1e-12):
    """I_ν(z) from its integral representation over the measure on [−1, 1]; slow validation oracle.

    For ν > −1/2 the density is (1−s²)^{ν−1/2}/(√π Γ(ν+1/2)) and the prefactor (z/2)^ν.  Both halves of [−1, 1] are
    mapped to [0, 1] by s = ±(1−t²), which turns the endpoint singularity into an algebraic weight t^{2ν} handled by
    the weighted rule of :func:`scipy.integrate.quad`.  For ν = −1/2 the measure is atomic at ±1.

    :param nu: Order, ν ≥ −1/2.
    :param z: Scalar argument, z ≥ 0.
    :param scaled: Return e^{−z}·I_ν(z) instead, which does not overflow for large z.
    :param rel_tol: Relative tolerance for the quadrature.
    """
    z = float(z)
    _check_bessel_args(nu, z)
    if z == 0:
        return _value_at_zero(nu)
    if nu == -0.5:
        value = np.sqrt(2 / (np.pi * z)) * (1 + np.exp(-2 * z)) / 2
    else:
        # ∫_{-1}^{1} e^{-z(1-s)} (1-s²)^{ν-1/2} ds after s = 1-t² (right half) and s = t²-1 (left half)
        def right(t):
            return 2 * (2 - t * t) ** (nu - 0.5) * np.exp(-z * t * t)

        def left(t):
            return 2 * (2 - t * t) ** (nu - 0.5) * np.exp(-z * (2 - t * t))

        cut = min(1., 8. / np.sqrt(z))
        integral = _quad(right, 0., cut, rel_tol, weight='alg', wvar=(2 * nu, 0.))
        if cut < 1:
            integral += _quad(lambda t: right(t) * t ** (2 * nu), cut, 1., rel_tol)
        integral += _quad(left, 0., 1., rel_tol, weight='alg', wvar=(2 * nu, 0.))
        log_prefactor = nu * np.log(z / 2) - special.gammaln(nu + 0.5) - 0.5 * np.log(np.pi)
        value = np.exp(log_prefactor) * integral
    if scaled:
        return float(value)
    with np.errstate(over='ignore'):
        return float(value * np.exp(z))
