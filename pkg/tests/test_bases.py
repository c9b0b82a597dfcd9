import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from hardylab import bases
from hardylab.bases import Family, SystemSpec
from hardylab.framework.errors import DomainError, ShapeError, UnsupportedOrderError


def std(alpha):
    return SystemSpec.build(Family.LAGUERRE_STD, alpha=alpha)


def hermite(alpha):
    return SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=alpha)


def generalized(lam):
    return SystemSpec.build(Family.GENERALIZED_HERMITE, lam=lam)


def jacobi(alpha, beta):
    return SystemSpec.build(Family.JACOBI, alpha=alpha, beta=beta)


def test_reference_values():
    assert bases.eval_1d(std(0), 0, 0.5) == pytest.approx(math.exp(-0.25), rel=1e-14)
    assert bases.eval_1d(jacobi(-0.5, -0.5), 0, 1.) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    assert bases.jacobi_log_norm(0, -0.5, -0.5) == pytest.approx(-0.5 * math.log(math.pi), rel=1e-14)


@pytest.mark.parametrize('alpha', [-0.5, 0., 0.5, 2.3])
@pytest.mark.parametrize('k', [0, 1, 4, 15])
def test_standard_laguerre_closed_form(alpha, k):
    u = np.linspace(0.1, 40., 50)
    expected = (np.exp(0.5 * (special.gammaln(k + 1) - special.gammaln(k + alpha + 1)))
                * special.eval_genlaguerre(k, alpha, u) * np.exp(-u / 2) * u ** (alpha / 2))
    np.testing.assert_allclose(bases.eval_1d(std(alpha), k, u), expected, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize('alpha', [-0.5, 0., 1.5])
@pytest.mark.parametrize('k', [0, 3, 11])
def test_hermite_type_is_standard_in_u_squared(alpha, k):
    u = np.linspace(0.05, 6., 40)
    np.testing.assert_allclose(bases.eval_1d(hermite(alpha), k, u),
                               np.sqrt(2 * u) * bases.eval_1d(std(alpha), k, u * u), rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize('n', range(12))
def test_generalized_hermite_at_zero_lambda_is_hermite_function(n):
    u = np.linspace(-6., 6., 61)
    expected = special.eval_hermite(n, u) * np.exp(-u * u / 2) / math.sqrt(2. ** n * math.factorial(n) * math.sqrt(
        math.pi))
    np.testing.assert_allclose(bases.eval_1d(generalized(0), n, u), expected, rtol=1e-9, atol=1e-12)


def gram_standard(alpha, kmax):
    x, w = special.roots_genlaguerre(40, alpha)
    rows = bases.eval_rows(std(alpha), kmax, x)
    return (rows * (w / (x ** alpha * np.exp(-x)))) @ rows.T


def gram_hermite_type(alpha, kmax):
    x, w = special.roots_genlaguerre(40, alpha)
    rows = bases.eval_rows(hermite(alpha), kmax, np.sqrt(x))
    return (rows * (w / (x ** alpha * np.exp(-x) * 2 * np.sqrt(x)))) @ rows.T


def gram_generalized(lam, kmax):
    u, w = special.roots_hermite(60)
    rows = bases.eval_rows(generalized(lam), kmax, u)
    return (rows * (w * np.exp(u * u))) @ rows.T


def gram_jacobi(alpha, beta, kmax):
    x, w = special.roots_jacobi(40, alpha, beta)
    theta = np.arccos(x)
    rows = bases.eval_rows(jacobi(alpha, beta), kmax, theta)
    envelope = np.sin(theta / 2) ** (alpha + 0.5) * np.cos(theta / 2) ** (beta + 0.5)
    rows = rows / envelope
    return (rows * w * 2. ** (-alpha - beta - 1)) @ rows.T


GRAMS = [
    (gram_standard, (0.,)),
    (gram_standard, (1.5,)),
    (gram_hermite_type, (-0.5,)),
    (gram_hermite_type, (0.7,)),
    (gram_generalized, (0,)),
    (gram_generalized, (1,)),
    (gram_jacobi, (-0.5, -0.5)),
    (gram_jacobi, (0.5, 1.5)),
    (gram_jacobi, (2., 0.)),
]


@pytest.mark.parametrize('gram,params', GRAMS)
def test_orthonormality(gram, params):
    np.testing.assert_allclose(gram(*params, 10), np.eye(11), atol=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize('gram,params', GRAMS)
def test_orthonormality_up_to_twenty(gram, params):
    np.testing.assert_allclose(gram(*params, 20), np.eye(21), atol=1e-8)


def test_large_index_values_stay_bounded():
    u = np.linspace(1., 8000., 400)
    values = bases.eval_1d(std(0), 2000, u)
    assert np.all(np.isfinite(values))
    assert np.max(np.abs(values)) <= 1 + 1e-6


def test_generalized_hermite_parity():
    u = np.linspace(0.1, 4., 20)
    for lam in (0., 0.5, 1.3):
        for n in range(8):
            np.testing.assert_allclose(bases.eval_1d(generalized(lam), n, -u),
                                       (-1) ** n * bases.eval_1d(generalized(lam), n, u), rtol=1e-13, atol=1e-15)


DERIVATIVE_CASES = [
    (std(0.7), [0.5, 2., 7.]),
    (std(-0.3), [0.4, 3.]),
    (hermite(0.3), [0.4, 1.5, 3.]),
    (hermite(-0.5), [0.2, 2.2]),
    (generalized(0.5), [-1.2, 0.3, 2.]),
    (generalized(0), [-0.7, 1.1]),
    (jacobi(0.5, 1.5), [0.4, 1.5, 2.7]),
    (jacobi(-0.5, 0.), [0.3, 2.]),
]


@pytest.mark.parametrize('system,u', DERIVATIVE_CASES)
@pytest.mark.parametrize('k', [0, 1, 5])
def test_first_derivative_matches_central_difference(system, u, k):
    u = np.array(u)
    h = 1e-5
    fd = (bases.eval_1d(system, k, u + h) - bases.eval_1d(system, k, u - h)) / (2 * h)
    exact = bases.eval_deriv_1d(system, k, 1, u)
    np.testing.assert_allclose(exact, fd, rtol=1e-6, atol=1e-7)


@pytest.mark.parametrize('system,u', DERIVATIVE_CASES)
@pytest.mark.parametrize('j', [2, 3, 4])
def test_higher_derivative_matches_difference_of_lower(system, u, j):
    u = np.array(u)
    h = 1e-5
    k = 3
    fd = (bases.eval_deriv_1d(system, k, j - 1, u + h) - bases.eval_deriv_1d(system, k, j - 1, u - h)) / (2 * h)
    exact = bases.eval_deriv_1d(system, k, j, u)
    np.testing.assert_allclose(exact, fd, rtol=1e-5, atol=1e-5 * max(1., np.max(np.abs(exact))))


def test_fifth_derivative_from_differences():
    system = std(0.5)
    u = np.array([1., 3.])
    h = 1e-4
    fd = (bases.eval_deriv_1d(system, 2, 4, u + h) - bases.eval_deriv_1d(system, 2, 4, u - h)) / (2 * h)
    np.testing.assert_allclose(bases.eval_deriv_1d(system, 2, 5, u), fd, rtol=1e-4)
    assert np.all(np.isfinite(bases.eval_deriv_1d(system, 2, 6, u)))


def test_derivative_order_limits():
    with pytest.raises(UnsupportedOrderError):
        bases.eval_deriv_1d(std(0), 1, bases.MAX_ORDER + 1, 1.)
    with pytest.raises(DomainError):
        bases.eval_deriv_1d(std(0), 1, -1, 1.)


def test_derivative_at_zero_of_smooth_extension():
    system = hermite(0.5)
    h = 1e-5
    for k in range(4):
        assert bases.eval_deriv_1d(system, k, 1, 0.) == pytest.approx(bases.eval_1d(system, k, h) / h, rel=1e-8)
        assert bases.eval_deriv_1d(system, k, 2, 0.) == 0.
    np.testing.assert_allclose(bases.deriv_rows(generalized(0), 5, 1, np.array([0.]))[:, 0],
                               (bases.eval_rows(generalized(0), 5, [h])[:, 0]
                                - bases.eval_rows(generalized(0), 5, [-h])[:, 0]) / (2 * h), rtol=1e-6, atol=1e-9)
    with pytest.raises(DomainError):
        bases.eval_deriv_1d(generalized(1), 2, 1, 0.)


@pytest.mark.parametrize('system,u', [(std(0.7), [0.5, 2.]), (jacobi(0.5, 1.5), [0.4, 2.])])
def test_weighted_derivative(system, u):
    u = np.array(u)
    for j in (1, 2):
        np.testing.assert_allclose(bases.eval_weighted_deriv_1d(system, 3, j, u, 0), bases.eval_deriv_1d(system, 3, j, u),
                                   rtol=1e-12, atol=1e-14)
    h = 1e-5
    if system.family is Family.JACOBI:
        def weight(x):
            return np.sin(x / 2) ** 1.5
    else:
        def weight(x):
            return x ** 1.5

    def g(x):
        return bases.eval_1d(system, 3, x) / weight(x)
    fd = (g(u + h) - g(u - h)) / (2 * h)
    np.testing.assert_allclose(bases.eval_weighted_deriv_1d(system, 3, 1, u, 1.5), fd, rtol=1e-6)


def test_domain_checks():
    with pytest.raises(DomainError):
        bases.eval_1d(std(0), 1, 0.)
    with pytest.raises(DomainError):
        bases.eval_1d(std(0), 1, -1.)
    with pytest.raises(DomainError):
        bases.eval_1d(jacobi(0, 0), 1, math.pi)
    with pytest.raises(DomainError):
        bases.eval_1d(std(0), -1, 1.)
    with pytest.raises(DomainError):
        bases.eval_1d(std(0), 1, np.nan)
    assert bases.eval_1d(hermite(0.5), 2, 0.) == 0.
    assert math.isfinite(bases.eval_1d(generalized(1.5), 2, 0.))


def test_system_validation():
    with pytest.raises(ShapeError):
        SystemSpec.build(Family.LAGUERRE_STD)
    with pytest.raises(ShapeError):
        SystemSpec.build(Family.LAGUERRE_STD, alpha=0., lam=1.)
    with pytest.raises(DomainError):
        std(-1.)
    with pytest.raises(DomainError):
        hermite(-0.6)
    with pytest.raises(DomainError):
        generalized(-0.1)
    with pytest.raises(DomainError):
        jacobi(0., -0.7)
    with pytest.raises(ShapeError):
        SystemSpec.build('jacobi', alpha=(0., 1.), beta=0., d=1)
    system = SystemSpec.build('laguerre-std', alpha=(0., 1.), d=2)
    assert system.coordinate(1).alpha == (1.,)
    assert system.describe() == {'family': 'laguerre-std', 'd': 2, 'alpha': ['0.0', '1.0']}


def test_tensor_product():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=(0., 1.), d=2)
    x = np.array([[0.5, 1.], [2., 3.]])
    expected = bases.eval_1d(std(0.), 2, x[:, 0]) * bases.eval_1d(std(1.), 1, x[:, 1])
    np.testing.assert_allclose(bases.eval_tensor(system, (2, 1), x), expected, rtol=1e-14)
    assert isinstance(bases.eval_tensor(system, bases.MultiIndex((0, 0)), x[0]), float)
    with pytest.raises(ShapeError):
        bases.eval_tensor(system, (1,), x)
    with pytest.raises(DomainError):
        bases.MultiIndex((1, -1))
    assert bases.MultiIndex((2, 3, 0)).length == 5


@settings(deadline=None, max_examples=50)
@given(k=st.integers(min_value=0, max_value=10 ** 6), alpha=st.floats(min_value=-0.99, max_value=50.))
def test_k_prime_at_least_two(k, alpha):
    value = bases.k_prime(k, alpha)
    assert value >= 2
    assert value == pytest.approx(max(4 * k + 2 * alpha + 2, 2.))
