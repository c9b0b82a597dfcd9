"""Adaptive Gauss-Kronrod quadrature, Gram matrices and atom coefficients ⟨a, φ_k⟩.

Integrands are vectorised: a callable maps an array of n points to an array of shape (n,) or (m, n), and all m
components are integrated on one shared panel set.
"""

import json
import logging
import math
import os
import threading
from dataclasses import dataclass

import numpy as np

from . import bases
from .bases import Family
from .framework.errors import DomainError, ShapeError, ToleranceError

logger = logging.getLogger(__name__)

PANEL_BUDGET = 4000  #: Default maximum number of panels per integral.

# 15-point Kronrod nodes and weights, with the embedded 7-point Gauss weights.
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadResult:
    """Value (scalar or vector), error estimate (same shape) and number of panels used."""

    value: object
    error_estimate: object
    panels_used: int


def _grading(sigma):
    """Exponent q of the map u = a + (b − a)t^q that makes u^σ·du smooth, or None when no grading is needed."""
    if sigma is None:
        return None
    if not sigma > -1:
        raise DomainError(f'Endpoint singularity exponent must exceed -1, got {sigma}.')
    if sigma >= 0 and float(sigma).is_integer():
        return None
    m = max(1, math.ceil(sigma + 1))
    return m / (sigma + 1)


class _Segment:
    """Integrand on [0, 1] in a graded variable, for one piece of the original interval."""

    def __init__(self, f, a, b, q, from_left):
        self.f, self.a, self.b, self.q, self.from_left = f, a, b, q, from_left

    def __call__(self, t):
        if self.q is None:
            u = self.a + (self.b - self.a) * t
            jac = np.full_like(t, self.b - self.a)
        else:
            length = self.b - self.a
            u = self.a + length * t ** self.q if self.from_left else self.b - length * t ** self.q
            jac = length * self.q * t ** (self.q - 1)
        values = np.asarray(self.f(u), dtype=float)
        return values * jac


def _segments(f, a, b, left_exponent, right_exponent):
    ql, qr = _grading(left_exponent), _grading(right_exponent)
    if ql is not None and qr is not None:
        mid = (a + b) / 2
        return [_Segment(f, a, mid, ql, True), _Segment(f, mid, b, qr, False)]
    if qr is not None:
        return [_Segment(f, a, b, qr, False)]
    return [_Segment(f, a, b, ql, True)]


def _apply_rule(segment, lo, hi):
    """Kronrod value and |Kronrod − Gauss| for panels [lo, hi] of one segment, shape (m, panels)."""
    half = (hi - lo) / 2
    points = ((lo + hi) / 2)[:, None] + half[:, None] * NODES[None, :]
    values = segment(points.ravel())
    scalar = values.ndim == 1
    values = values.reshape((1 if scalar else values.shape[0],) + points.shape)
    kronrod = (values * KRONROD_WEIGHTS).sum(axis=-1) * half
    gauss = (values * GAUSS_WEIGHTS).sum(axis=-1) * half
    return kronrod, np.abs(kronrod - gauss), scalar


def integrate_adaptive(f, a, b, abs_tol=1e-12, rel_tol=1e-10, left_exponent=None, right_exponent=None, min_panels=1,
                       panel_budget=PANEL_BUDGET):
    """Integrate ``f`` over the finite interval [a, b] by adaptive 15-point Gauss-Kronrod panels.

    Power-type endpoint singularities u^σ (σ > −1) declared by the caller are removed by the grading substitution
    u = a + (b − a)t^q with q = m/(σ+1), m = ⌈σ+1⌉.  Each step bisects the panels carrying the largest half of the
    normalised error until every component meets max(abs_tol, rel_tol·|value|).

    :param f: Vectorised integrand, array of points → (n,) or (m, n).
    :param left_exponent: σ at a, or None.
    :param right_exponent: σ at b, or None.
    :param min_panels: Initial number of panels per segment.
    :param panel_budget: Maximum total number of panels.
    :raises ToleranceError: when the budget is exhausted, carrying the best value and estimate.
    """
    if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
        raise DomainError(f'Need a finite interval with a < b, got [{a}, {b}].')
    segments = _segments(f, a, b, left_exponent, right_exponent)
    n0 = max(1, min(int(min_panels), panel_budget // (2 * len(segments))))
    seg_ids = np.repeat(np.arange(len(segments)), n0)
    edges = np.linspace(0., 1., n0 + 1)
    lo = np.tile(edges[:-1], len(segments))
    hi = np.tile(edges[1:], len(segments))
    values = errors = None
    scalar = True
    todo = np.arange(lo.size)

    while True:
        new_vals, new_errs = [], []
        for s, segment in enumerate(segments):
            sel = todo[seg_ids[todo] == s]
            if sel.size:
                k, e, scalar = _apply_rule(segment, lo[sel], hi[sel])
                new_vals.append((sel, k))
                new_errs.append(e)
        if values is None:
            m = new_vals[0][1].shape[0]
            values = np.zeros((m, lo.size))
            errors = np.zeros((m, lo.size))
        for (sel, k), e in zip(new_vals, new_errs):
            values[:, sel] = k
            errors[:, sel] = e

        total = values.sum(axis=1)
        estimate = errors.sum(axis=1)
        tolerance = np.maximum(abs_tol, rel_tol * np.abs(total))
        if np.all(estimate <= tolerance):
            break
        normalized = (errors / tolerance[:, None]).max(axis=0)
        order = np.argsort(-normalized, kind='stable')
        cumulative = np.cumsum(normalized[order])
        count = int(np.searchsorted(cumulative, cumulative[-1] / 2)) + 1
        chosen = order[:count]
        if lo.size + chosen.size > panel_budget:
            value = total[0] if scalar else total
            est = estimate[0] if scalar else estimate
            raise ToleranceError(f'Quadrature panel budget {panel_budget} exhausted on [{a}, {b}] with estimate '
                                 f'{np.max(estimate):.3g}.', value=value, estimate=est)
        mid = (lo[chosen] + hi[chosen]) / 2
        first_new = lo.size
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([hi, hi[chosen]])
        hi[chosen] = mid
        seg_ids = np.concatenate([seg_ids, seg_ids[chosen]])
        values = np.concatenate([values, np.zeros((values.shape[0], chosen.size))], axis=1)
        errors = np.concatenate([errors, np.zeros((errors.shape[0], chosen.size))], axis=1)
        todo = np.concatenate([chosen, np.arange(first_new, lo.size)])

    logger.debug('Adaptive quadrature on [%g, %g]: %d panels.', a, b, lo.size)
    if scalar:
        return QuadResult(float(total[0]), float(estimate[0]), int(lo.size))
    return QuadResult(total, estimate, int(lo.size))


# Basis-function integrals --------------------------------------------------------------------------------------------

def endpoint_exponent(system):
    """Power of the distance to the left endpoint in φ_k near it: α/2, α+1/2, λ (at 0) or α+1/2."""
    family = system.family
    if family is Family.LAGUERRE_STD:
        return system.a / 2
    if family is Family.JACOBI:
        return system.a + 0.5
    if family is Family.LAGUERRE_HERMITE:
        return system.a + 0.5
    return system.a


def truncated_domain(system, kmax):
    """Finite integration pieces covering the support of φ_0, …, φ_kmax up to weights below 1e-18.

    :return: list of (a, b, left exponent, right exponent) for the functions themselves; exponents of products are
      derived by the caller.
    """
    family = system.family
    kp = float(bases.k_prime(kmax, system.a))
    cutoff = 2 * kp + 90
    if family is Family.LAGUERRE_STD:
        return [(0., cutoff, endpoint_exponent(system), None)]
    if family is Family.LAGUERRE_HERMITE:
        return [(0., math.sqrt(cutoff), endpoint_exponent(system), None)]
    if family is Family.GENERALIZED_HERMITE:
        edge = math.sqrt(cutoff)
        sigma = endpoint_exponent(system)
        return [(-edge, 0., None, sigma), (0., edge, sigma, None)]
    return [(0., math.pi, system.a + 0.5, system.b + 0.5)]


def _product_exponent(sigma):
    return None if sigma is None else 2 * sigma


def gram_matrix(system, kmax, abs_tol=1e-12, rel_tol=1e-10, panel_budget=PANEL_BUDGET):
    """∫ φ_j φ_k over the (truncated) domain for j, k ≤ kmax, as one vector-valued adaptive integral."""
    size = kmax + 1

    def integrand(u):
        rows = bases.eval_rows(system, kmax, u)
        return (rows[:, None, :] * rows[None, :, :]).reshape(size * size, -1)

    total = np.zeros(size * size)
    for a, b, left, right in truncated_domain(system, kmax):
        result = integrate_adaptive(integrand, a, b, abs_tol, rel_tol, _product_exponent(left),
                                    _product_exponent(right), min_panels=1 + kmax, panel_budget=panel_budget)
        total += result.value
    return total.reshape(size, size)


def _domain_scale(system):
    return math.pi if system.family is Family.JACOBI else 1.


def inner_products(system, a, kmax, abs_tol=1e-12, rel_tol=1e-10, panel_budget=PANEL_BUDGET):
    """⟨a, φ_k⟩ for k = 0, …, kmax.

    Each constant piece is integrated as one vector-valued integral of the rows φ_0..φ_kmax, with an initial panel
    count 1 + ⌈kmax·length/scale⌉ to resolve the oscillation.

    :param system: One-dimensional :obj:`.bases.SystemSpec`.
    :param a: :obj:`.atoms.PiecewiseConstant1D` with support inside the domain.
    """
    domain = bases.DomainBox.for_family(system.family)
    if a.breakpoints[0] < domain.lower[0] or a.support_right > domain.upper[0]:
        raise DomainError(f'Atom support (0, {a.support_right}) is not inside the {system.family.value} domain.')
    sigma = endpoint_exponent(system)
    scale = _domain_scale(system)
    total = np.zeros(kmax + 1)
    for left, right, value in a.pieces:
        if value == 0:
            continue
        right_exponent = system.b + 0.5 if system.family is Family.JACOBI and right >= math.pi else None
        result = integrate_adaptive(lambda u: bases.eval_rows(system, kmax, u), left, right, abs_tol / abs(value),
                                    rel_tol, sigma if left == 0 else None, right_exponent,
                                    min_panels=1 + math.ceil(kmax * (right - left) / scale),
                                    panel_budget=panel_budget)
        total += value * np.atleast_1d(result.value)
    return total


def inner_product(system, k, a, tol=1e-12, panel_budget=PANEL_BUDGET):
    """⟨a, φ_k⟩ for one index."""
    return float(inner_products(system, a, k, abs_tol=tol, panel_budget=panel_budget)[k])


class CoefficientCache:
    """Thread-safe map (system key, atom hash) → coefficient array, optionally persisted as a JSON file.

    Entries only ever grow: a request for more indices than cached recomputes and replaces the entry.  Concurrent
    writers of the same key store identical values.

    :param path: JSON sidecar file, read on creation and written by :meth:`save`.
    """

    def __init__(self, path=None):
        self.path = path
        self._lock = threading.Lock()
        self._data = {}
        if path and os.path.exists(path):
            with open(path, encoding='utf-8') as f:
                self._data = {key: np.array(values) for key, values in json.load(f).items()}
            logger.debug('Loaded %d cached coefficient rows from %s.', len(self._data), path)

    @staticmethod
    def key(system, a, abs_tol, rel_tol):
        return json.dumps([system.key, a.content_hash, abs_tol, rel_tol])

    def __len__(self):
        return len(self._data)

    def get(self, system, a, kmax, abs_tol=1e-12, rel_tol=1e-10, panel_budget=PANEL_BUDGET):
        """Coefficients ⟨a, φ_k⟩, k ≤ kmax, computed by :func:`inner_products` on a miss."""
        key = self.key(system, a, abs_tol, rel_tol)
        with self._lock:
            cached = self._data.get(key)
        if cached is not None and cached.size > kmax:
            return cached[:kmax + 1].copy()
        values = inner_products(system, a, kmax, abs_tol, rel_tol, panel_budget)
        with self._lock:
            current = self._data.get(key)
            if current is None or current.size < values.size:
                self._data[key] = values
        return values.copy()

    def save(self):
        if not self.path:
            return
        with self._lock:
            payload = {key: values.tolist() for key, values in sorted(self._data.items())}
        with open(self.path, 'w', encoding='utf-8') as f:
            json.dump(payload, f)
        logger.debug('Saved %d coefficient rows to %s.', len(payload), self.path)


def coefficients_tensor(system, a, n, tol=1e-12, cache=None):
    """⟨A, φ_n⟩ = Π_i ⟨a_i, φ_{n_i}⟩ for a product atom."""
    n = n if isinstance(n, bases.MultiIndex) else bases.MultiIndex(tuple(n))
    if n.d != system.d or a.d != system.d:
        raise ShapeError(f'Dimension mismatch: system d={system.d}, atom d={a.d}, index {n.n}.')
    cache = CoefficientCache() if cache is None else cache
    value = 1.
    for i, (factor, k) in enumerate(zip(a.factors, n.n)):
        value *= cache.get(system.coordinate(i), factor, k, abs_tol=tol)[k]
    return float(value)
