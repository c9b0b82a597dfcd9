"""Sharpness experiments: Hardy sums with a deficient exponent E − ε grow like K^ε on the counterexample atoms.

For each K of a grid the counterexample atom a_K with A = K^{2γ}/c is expanded in the system, and the report records
the deficient sum S_ε(K), the normalized coefficient lower bound r(K) and a least-squares slope of log S_ε against
log K.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy import stats

from .atoms import as_fraction, build_counterexample_atom, vanishing_order
from .bases import Family
from .framework.errors import DomainError, ToleranceError, UnsupportedError
from .hardy import gamma_for, hardy_sum_from_coefficients, theorem_exponent
from .quadrature import PANEL_BUDGET, CoefficientCache

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['K', 'A', 'S_eps', 'tail', 'tail_unbounded', 'r_min', 'sign_coherent', 'S_over_logK', 'error']
DEFAULT_EPSILON = Fraction(1, 5)


class Route(Enum):
    """How the coefficient lower bound is obtained."""

    DIRECT = 'direct'
    DERIVATIVE = 'derivative'
    BOUNDARY = 'boundary'


def domain_scale(system):
    """c with (0, c) inside the domain: 1 for the Laguerre families, π/2 for Jacobi."""
    return math.pi / 2 if system.family is Family.JACOBI else 1.


@dataclass(frozen=True)
class SharpnessSetup:
    """Outcome of :func:`derive_sharpness_params`."""

    tau: Fraction
    gamma: Fraction
    threshold: Fraction
    threshold_satisfied: bool
    route: Route
    P: int

    def to_dict(self):
        return {'tau': self.tau, 'gamma': self.gamma, 'threshold': self.threshold,
                'threshold_satisfied': self.threshold_satisfied, 'route': self.route, 'P': self.P}


def _natural(value):
    return value >= 0 and value.denominator == 1


def _ceil_half(value):
    return math.ceil(Fraction(value) / 2)


def derive_sharpness_params(system, p, route=None):
    """τ, γ, the threshold (4γ − 2pγ − p)/(2p) and the route for a one-dimensional system.

    The direct route needs τ > threshold with τ = α/2 (Laguerre families) or α + 1/2 (Jacobi).  The derivative route
    needs the endpoint exponent ℓ (α/2, α + 1/2, α + 1/2) to be a natural number and uses the derivative-based τ.
    The boundary route covers τ = threshold with 1/p not an integer.

    :param route: Force a route; it must still be applicable.
    :raises UnsupportedError: when no route applies.
    """
    coordinate = system.coordinate(0)
    family = coordinate.family
    if family is Family.GENERALIZED_HERMITE:
        raise UnsupportedError('Sharpness experiments are not available for generalized Hermite functions.')
    p = as_fraction(p)
    alpha = as_fraction(coordinate.alpha[0])
    gamma = gamma_for(coordinate)
    P = vanishing_order(p)
    threshold = (4 * gamma - 2 * p * gamma - p) / (2 * p)
    if family is Family.JACOBI:
        tau_direct = alpha + Fraction(1, 2)
        ell = alpha + Fraction(1, 2)
    elif family is Family.LAGUERRE_HERMITE:
        tau_direct = alpha / 2
        ell = alpha + Fraction(1, 2)
    else:
        tau_direct = alpha / 2
        ell = alpha / 2

    tau_derivative = None
    if _natural(ell):
        if family is Family.LAGUERRE_STD:
            tau_derivative = Fraction(P + 1)
        elif family is Family.LAGUERRE_HERMITE:
            tau_derivative = alpha / 2 + _ceil_half(P + 1 - ell)
        else:
            tau_derivative = alpha + Fraction(1, 2) + 2 * _ceil_half(P + 1 - ell)

    applicable = {
        Route.DIRECT: tau_direct > threshold,
        Route.DERIVATIVE: tau_derivative is not None and tau_derivative > threshold,
        Route.BOUNDARY: tau_direct == threshold and (1 / p).denominator != 1,
    }
    if route is None:
        route = next((r for r in Route if applicable[r]), None)
        if route is None:
            raise UnsupportedError(f'No sharpness route for {family.value} with alpha={alpha}, p={p}: tau={tau_direct} '
                                   f'does not exceed the threshold {threshold}.')
    else:
        route = Route(route)
        if not applicable[route]:
            raise UnsupportedError(f'Route {route.value} does not apply to {family.value} with alpha={alpha}, p={p}.')
    tau = tau_derivative if route is Route.DERIVATIVE else tau_direct
    logger.debug('Sharpness setup: tau=%s gamma=%s threshold=%s route=%s.', tau, gamma, threshold, route.value)
    return SharpnessSetup(tau, gamma, threshold, tau_direct > threshold, route, P)


@dataclass(frozen=True)
class SharpnessParams:
    """Everything a sharpness run needs; build it with :meth:`create`."""

    system: object
    p: Fraction
    s: Fraction
    epsilon: float
    K_grid: tuple
    delta: Fraction
    c: float
    tau: Fraction
    gamma: Fraction
    route: Route

    def __post_init__(self):
        if not self.K_grid or list(self.K_grid) != sorted(set(self.K_grid)) or self.K_grid[0] < 1:
            raise DomainError(f'K grid must be strictly increasing positive integers, got {self.K_grid}.')
        P = vanishing_order(self.p)
        if not 0 < self.delta <= Fraction(1, 2 * (P + 1)):
            raise DomainError(f'delta must lie in (0, 1/{2 * (P + 1)}], got {self.delta}.')
        for K in self.K_grid:
            if self.dilation(K) < 1:
                raise DomainError(f'A = K^(2 gamma)/c = {self.dilation(K):.4g} < 1 for K = {K}; use larger K.')
        if not self.epsilon >= 0:
            raise DomainError(f'epsilon must be non-negative, got {self.epsilon}.')

    @classmethod
    def create(cls, system, p, s, epsilon, K_grid, delta=None, route=None):
        """Derive τ, γ and the route, then fill in the defaults.

        :param epsilon: Deficit of the exponent; ``None`` gives 1/5, or 0 on the boundary route.
        :raises DomainError: for a nonzero epsilon on the boundary route, whose sums use the exponent itself.
        """
        setup = derive_sharpness_params(system, p, route)
        if setup.route is Route.BOUNDARY:
            if epsilon is not None and epsilon != 0:
                raise DomainError(f'The boundary route sums with epsilon = 0, got {epsilon}.')
            epsilon = 0
        elif epsilon is None:
            epsilon = DEFAULT_EPSILON
        p = as_fraction(p)
        delta = Fraction(1, 8 * (setup.P + 1)) if delta is None else as_fraction(delta)
        return cls(system, p, as_fraction(s), float(epsilon), tuple(int(K) for K in K_grid), delta,
                   domain_scale(system.coordinate(0)), setup.tau, setup.gamma, setup.route)

    def dilation(self, K):
        """A = K^{2γ}/c as float."""
        return float(K) ** float(2 * self.gamma) / self.c

    @property
    def exponent(self):
        """Theorem exponent E of the system; sums use E − ε."""
        return theorem_exponent(self.system, self.p, self.s)

    @property
    def predicted_slope(self):
        """sd(2γ/p − 1/2 − τ − γ) − (E − ε) + sdτ + d."""
        s, d = float(self.s), self.system.d
        power = float(2 * self.gamma / self.p - Fraction(1, 2) - self.tau - self.gamma)
        return s * d * power - (float(self.exponent) - self.epsilon) + s * d * float(self.tau) + d

    def to_dict(self):
        return {'system': self.system.describe(), 'p': self.p, 's': self.s, 'epsilon': self.epsilon,
                'K_grid': list(self.K_grid), 'delta': self.delta, 'c': self.c, 'tau': self.tau, 'gamma': self.gamma,
                'route': self.route}


@dataclass(frozen=True)
class SharpnessReport:
    """Per-K table and the fitted growth slope."""

    params: SharpnessParams
    table: pd.DataFrame = field(compare=False)
    slope: float
    intercept: float
    band: float
    r_ratio: float
    slope_half_delta: float = math.nan
    log_bracket: float = math.nan

    @property
    def delta_stable(self):
        """Whether halving δ moves the slope by less than the confidence band."""
        return bool(abs(self.slope - self.slope_half_delta) < self.band)

    def summary(self):
        return {'params': self.params.to_dict(), 'slope': self.slope, 'intercept': self.intercept, 'band': self.band,
                'predicted_slope': self.params.predicted_slope, 'r_ratio': self.r_ratio,
                'slope_half_delta': self.slope_half_delta, 'delta_stable': self.delta_stable,
                'S_over_logK_bracket': self.log_bracket}


def _lower_bound_ratio(coefficients, K, params):
    """min_{k ≤ K} |c_k| / ((k+1)^τ K^{2γ/p − 1/2 − τ − γ})."""
    tau = float(params.tau)
    power = float(2 * params.gamma / params.p - Fraction(1, 2) - params.tau - params.gamma)
    k = np.arange(K + 1)
    return float(np.min(np.abs(coefficients[:K + 1]) / ((k + 1.) ** tau * float(K) ** power)))


def _run_one(params, K, delta, cache, abs_tol, rel_tol, panel_budget, k_cap_factor):
    """One row of the table; r_min and sign_coherent are taken over all coordinates."""
    A = params.dilation(K)
    atom = build_counterexample_atom(params.p, A, delta)
    k_cap = k_cap_factor * K
    row = dict.fromkeys(TABLE_COLUMNS, math.nan)
    row.update({'K': K, 'A': A, 'tail_unbounded': False, 'sign_coherent': False, 'error': ''})
    try:
        coefficients = [cache.get(params.system.coordinate(i), atom, k_cap, abs_tol, rel_tol, panel_budget)
                        for i in range(params.system.d)]
    except ToleranceError as e:
        logger.warning('K=%d: %s', K, e.message)
        row['error'] = e.message
        return row
    result = hardy_sum_from_coefficients(coefficients, float(params.exponent) - params.epsilon,
                                         params.s, atom.l2_norm_sq() ** params.system.d, k_cap)
    heads = [c[:K + 1] for c in coefficients]
    row.update({
        'S_eps': result.partial_sum,
        'tail': result.tail_bound,
        'tail_unbounded': result.tail_unbounded,
        'r_min': min(_lower_bound_ratio(c, K, params) for c in coefficients),
        'sign_coherent': all(bool(np.all(head > 0) or np.all(head < 0)) for head in heads),
        'S_over_logK': result.partial_sum / math.log(K) if K > 1 else math.nan,
    })
    return row


def _fit(table):
    """Slope of log S against log K without the smallest K, with the 95% Student-t band."""
    data = table[table['error'] == ''].iloc[1:]
    data = data[np.isfinite(data['S_eps']) & (data['S_eps'] > 0)]
    if len(data) < 2:
        return math.nan, math.nan, math.nan
    fit = stats.linregress(np.log(data['K'].astype(float)), np.log(data['S_eps'].astype(float)))
    dof = len(data) - 2
    band = float(stats.t.ppf(0.975, dof) * fit.stderr) if dof > 0 else math.inf
    return float(fit.slope), float(fit.intercept), band


def _table(params, delta, cache, threads, abs_tol, rel_tol, panel_budget, k_cap_factor):
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(lambda K: _run_one(params, K, delta, cache, abs_tol, rel_tol, panel_budget,
                                                k_cap_factor), params.K_grid))
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def run_sharpness(params, abs_tol=1e-12, rel_tol=1e-10, panel_budget=PANEL_BUDGET, threads=1, cache=None,
                  k_cap_factor=4, check_delta=True):
    """Run the experiment over the K grid.

    :param params: :obj:`SharpnessParams`.
    :param threads: Worker threads for the per-K computations.
    :param cache: :obj:`.quadrature.CoefficientCache` shared across runs.
    :param k_cap_factor: Coefficients are computed for k ≤ k_cap_factor·K; the rest is covered by the tail bound.
    :param check_delta: Also run at δ/2 and report the slope there.
    :return: :obj:`SharpnessReport`; per-K quadrature failures are recorded in the ``error`` column.
    """
    cache = CoefficientCache() if cache is None else cache
    table = _table(params, params.delta, cache, threads, abs_tol, rel_tol, panel_budget, k_cap_factor)
    slope, intercept, band = _fit(table)
    valid = table[table['error'] == '']
    r_ratio = float(valid['r_min'].max() / valid['r_min'].min()) if len(valid) else math.nan
    slope_half = math.nan
    if check_delta:
        half = replace(params, delta=params.delta / 2)
        slope_half = _fit(_table(half, half.delta, cache, threads, abs_tol, rel_tol, panel_budget, k_cap_factor))[0]
    log_bracket = math.nan
    if params.route is Route.BOUNDARY:
        ratios = valid['S_over_logK'].dropna()
        log_bracket = float(ratios.max() / ratios.min()) if len(ratios) else math.nan
    logger.info('Sharpness %s: slope %.4f +- %.4f (predicted %.4f).', params.system.family.value, slope, band,
                params.predicted_slope)
    return SharpnessReport(params, table, slope, intercept, band, r_ratio, slope_half, log_bracket)
