import math

import numpy as np
import pytest

from hardylab import bases, kernels
from hardylab.bases import Family, SystemSpec
from hardylab.framework.errors import DomainError, ShapeError, TruncationError, UnsupportedError
from hardylab.quadrature import integrate_adaptive

CLOSED_FORM_SYSTEMS = [
    (SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=-0.5), (0.1, 3.)),
    (SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.5), (0.1, 3.)),
    (SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=2.), (0.1, 3.)),
    (SystemSpec.build(Family.LAGUERRE_STD, alpha=0.), (0.1, 8.)),
    (SystemSpec.build(Family.LAGUERRE_STD, alpha=-0.5), (0.1, 8.)),
    (SystemSpec.build(Family.LAGUERRE_STD, alpha=1.5), (0.1, 8.)),
    (SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0.), (-3., 3.)),
    (SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0.7), (-3., 3.)),
]


def mehler(r, x, y):
    return np.exp(-((1 + r * r) * (x * x + y * y) - 4 * r * x * y) / (2 * (1 - r * r))) / np.sqrt(
        math.pi * (1 - r * r))


@pytest.mark.parametrize('system,interval', CLOSED_FORM_SYSTEMS)
@pytest.mark.parametrize('r', [0.2, 0.5, 0.8])
def test_closed_form_matches_spectral_sum(system, interval, r):
    u, v = np.meshgrid(np.linspace(*interval, 7), np.linspace(*interval, 5))
    u, v = u.ravel(), v.ravel()
    closed = kernels.kernel_closed_1d(system, r, u, v)
    spectral = kernels.kernel_spectral(system, r, u, v, tol=1e-13)
    np.testing.assert_allclose(closed, spectral, rtol=1e-8, atol=1e-11)


@pytest.mark.parametrize('r', [0.1, 0.6, 0.95])
def test_generalized_hermite_at_zero_lambda_is_mehler_kernel(r):
    system = SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0)
    x = np.linspace(-4., 4., 17)
    y = np.linspace(-1., 3., 17)
    np.testing.assert_allclose(kernels.kernel_closed_1d(system, r, x, y), mehler(r, x, y), rtol=1e-8, atol=1e-12)


def test_closed_form_far_out_does_not_overflow():
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.5)
    values = kernels.kernel_closed_1d(system, 0.99, np.array([50., 200., 400.]), np.array([50.1, 200., 400.2]))
    assert np.all(np.isfinite(values))
    assert np.all(values > 0)


def test_kernel_is_symmetric():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=0.3)
    u = np.array([0.2, 1., 5.])
    v = np.array([3., 0.7, 2.])
    np.testing.assert_allclose(kernels.kernel_closed_1d(system, 0.4, u, v),
                               kernels.kernel_closed_1d(system, 0.4, v, u), rtol=1e-13)
    assert isinstance(kernels.kernel_closed_1d(system, 0.4, 1., 2.), float)


def test_jacobi_kernel_is_spectral_only():
    system = SystemSpec.build(Family.JACOBI, alpha=0.5, beta=0.5)
    assert not kernels.has_closed_form(system)
    with pytest.raises(UnsupportedError):
        kernels.kernel_closed_1d(system, 0.5, 1., 2.)
    value = kernels.kernel_1d(system, 0.5, 1., 2.)
    assert value == pytest.approx(kernels.kernel_spectral(system, 0.5, 1., 2., K_max=80), rel=1e-10)


def test_standard_laguerre_below_minus_half_has_no_closed_form():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=-0.7)
    with pytest.raises(UnsupportedError):
        kernels.kernel_closed_1d(system, 0.5, 1., 2.)


def test_truncation():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=0.)
    trunc = kernels.spectral_truncation(system, 0.5, tol=1e-10)
    assert trunc.tail_bound <= 1e-10
    assert kernels.spectral_tail_bound(system, 0.5, trunc.K_max - 1) > 1e-10
    with pytest.raises(TruncationError) as info:
        kernels.kernel_spectral(system, 0.5, 1., 2., K_max=5, tol=1e-12)
    assert info.value.bound > 1e-12
    with pytest.raises(DomainError):
        kernels.spectral_truncation(system, 1.)


@pytest.mark.parametrize('alpha', [0., 0.5])
def test_hermite_tail_estimate_covers_the_tail(alpha):
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=alpha)
    assert not kernels.tail_is_rigorous(system)
    assert kernels.tail_is_rigorous(SystemSpec.build(Family.LAGUERRE_STD, alpha=0.))
    assert not kernels.tail_is_rigorous(SystemSpec.build(Family.LAGUERRE_STD, alpha=-0.5))
    u = np.array([0.5, 1., 2.])
    rows = bases.eval_rows(system, 200, u)
    k = np.arange(201)
    for K_max in (5, 10, 20):
        tail = np.sum((0.5 ** k[K_max + 1:])[:, None] * rows[K_max + 1:] ** 2, axis=0)
        assert np.all(tail <= kernels.spectral_tail_bound(system, 0.5, K_max, u, u))


def test_tensor_kernel_is_product():
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=(0.5, 1.), d=2)
    x = np.array([0.4, 1.2])
    y = np.array([0.9, 0.3])
    expected = (kernels.kernel_1d(system.coordinate(0), 0.3, x[0], y[0])
                * kernels.kernel_1d(system.coordinate(1), 0.3, x[1], y[1]))
    assert kernels.kernel_tensor(system, 0.3, x, y) == pytest.approx(expected, rel=1e-13)
    assert kernels.KernelQuery(system, 0.3, tuple(x), tuple(y)).value() == pytest.approx(expected, rel=1e-13)
    with pytest.raises(ShapeError):
        kernels.KernelQuery(system, 0.3, (0.4,), (0.9,))
    with pytest.raises(DomainError):
        kernels.KernelQuery(system, 0.3, (-0.4, 1.2), (0.9, 0.3))
    with pytest.raises(DomainError):
        kernels.KernelQuery(system, 1.2, tuple(x), tuple(y))


@pytest.mark.parametrize('alpha', [-0.5, 0.5, (0., 1.5)])
@pytest.mark.parametrize('t', [0.05, 0.3, 2.])
def test_heat_kernel_explicit_formula(alpha, t):
    d = len(alpha) if isinstance(alpha, tuple) else 1
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=alpha, d=d)
    rng = np.random.default_rng(7)
    x = rng.uniform(0.1, 3., size=(6, d))
    y = rng.uniform(0.1, 3., size=(6, d))
    np.testing.assert_allclose(kernels.heat_kernel_explicit(system, t, x, y), kernels.heat_kernel(system, t, x, y),
                               rtol=1e-8, atol=1e-300)


def test_heat_semigroup():
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.5)
    t, s = 0.2, 0.35
    x, y = 0.8, 1.7

    def integrand(z):
        return (kernels.heat_kernel(system, t, np.full((z.size, 1), x), z[:, None])
                * kernels.heat_kernel(system, s, z[:, None], np.full((z.size, 1), y)))

    composed = integrate_adaptive(integrand, 0., 14., abs_tol=1e-14, rel_tol=1e-12).value
    assert composed == pytest.approx(kernels.heat_kernel(system, t + s, np.array([x]), np.array([y])), rel=1e-8)


@pytest.mark.parametrize('t', [0.25, 1.])
def test_heat_decay_ratio_is_weighted_parseval_sum(t):
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.5)
    u = np.array([0.5, 1.5])
    rows = bases.eval_rows(system, 60, u)
    weights = np.exp(-8 * t * np.arange(61))
    expected = np.max(np.sqrt(weights @ rows ** 2))
    assert kernels.heat_decay_ratio(system, t, u) == pytest.approx(expected, rel=1e-7)


def test_heat_kernel_errors():
    with pytest.raises(UnsupportedError):
        kernels.heat_kernel(SystemSpec.build(Family.LAGUERRE_STD, alpha=0.), 0.1, [1.], [1.])
    with pytest.raises(DomainError):
        kernels.heat_kernel(SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.), 0., [1.], [1.])


@pytest.mark.parametrize('j', [1, 2])
def test_kernel_derivative_norm_methods_agree(j):
    system = SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.5)
    fd = kernels.kernel_deriv_l2(system, 0.5, j, 1., abs_tol=1e-8, rel_tol=1e-8, method='fd')
    spectral = kernels.kernel_deriv_l2(system, 0.5, j, 1., abs_tol=1e-14, method='spectral')
    assert fd == pytest.approx(spectral, rel=1e-5)


def test_kernel_derivative_pointwise():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=0.5)
    v = np.array([0.5, 1., 3.])
    fd = kernels.kernel_deriv(system, 0.4, 1, 2., v, method='fd')
    spectral = kernels.kernel_deriv(system, 0.4, 1, 2., v, method='spectral')
    np.testing.assert_allclose(fd, spectral, rtol=1e-6, atol=1e-10)
    with pytest.raises(DomainError):
        kernels.kernel_deriv(system, 0.4, 4, 2., v)
    with pytest.raises(DomainError):
        kernels.kernel_deriv(system, 0.4, 1, 2., v, method='other')


def test_fd_step():
    system = SystemSpec.build(Family.JACOBI, alpha=0., beta=0.)
    assert kernels.fd_step(system, 0.75, 1, 1.5) == pytest.approx(5e-4)
    assert kernels.fd_step(system, 0.75, 3, 1e-3) == pytest.approx(1e-3 / 3)
    with pytest.raises(DomainError):
        kernels.fd_step(system, 0.75, 1, 0.)
