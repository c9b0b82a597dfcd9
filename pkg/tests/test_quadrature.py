import math
from fractions import Fraction

import numpy as np
import pytest

from hardylab import quadrature
from hardylab.atoms import PiecewiseConstant1D, ProductAtom, build_counterexample_atom
from hardylab.bases import Family, SystemSpec
from hardylab.framework.errors import DomainError, ToleranceError


def test_smooth_integrals():
    assert quadrature.integrate_adaptive(np.sin, 0., math.pi).value == pytest.approx(2., rel=1e-12)
    assert quadrature.integrate_adaptive(np.exp, -1., 2.).value == pytest.approx(math.exp(2) - math.exp(-1), rel=1e-12)


@pytest.mark.parametrize('sigma,expected', [(-0.5, 2.), (-0.9, 10.), (0.3, 1 / 1.3), (2.5, 1 / 3.5)])
def test_left_endpoint_singularity(sigma, expected):
    result = quadrature.integrate_adaptive(lambda u: u ** sigma, 0., 1., left_exponent=sigma)
    assert result.value == pytest.approx(expected, rel=1e-10)


def test_both_endpoint_singularities():
    # ∫_0^1 u^{-1/2}(1-u)^{-1/2} du = π
    result = quadrature.integrate_adaptive(lambda u: (u * (1 - u)) ** -0.5, 0., 1., left_exponent=-0.5,
                                           right_exponent=-0.5)
    assert result.value == pytest.approx(math.pi, rel=1e-10)


def test_vector_integrand():
    result = quadrature.integrate_adaptive(lambda u: np.vstack([u, u ** 2, np.cos(u)]), 0., 1.)
    np.testing.assert_allclose(result.value, [0.5, 1 / 3, math.sin(1.)], rtol=1e-12)
    assert result.error_estimate.shape == (3,)


def test_budget_exhaustion():
    with pytest.raises(ToleranceError) as info:
        quadrature.integrate_adaptive(lambda u: np.sin(200 * u), 0., 10., abs_tol=1e-14, rel_tol=1e-14,
                                      panel_budget=4)
    assert info.value.value is not None
    assert info.value.estimate > 0
    assert info.value.exit_code == 4


def test_invalid_intervals():
    with pytest.raises(DomainError):
        quadrature.integrate_adaptive(np.sin, 1., 0.)
    with pytest.raises(DomainError):
        quadrature.integrate_adaptive(np.sin, 0., np.inf)
    with pytest.raises(DomainError):
        quadrature.integrate_adaptive(np.sin, 0., 1., left_exponent=-1.)


@pytest.mark.parametrize('system', [
    SystemSpec.build(Family.LAGUERRE_STD, alpha=0.),
    SystemSpec.build(Family.LAGUERRE_STD, alpha=-0.5),
    SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=0.25),
    SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0.5),
    SystemSpec.build(Family.JACOBI, alpha=-0.5, beta=0.5),
])
def test_gram_matrix_is_identity(system):
    np.testing.assert_allclose(quadrature.gram_matrix(system, 6), np.eye(7), atol=1e-9)


def test_inner_products_of_simple_function():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=0.)
    a = PiecewiseConstant1D((0, Fraction(1, 4), 1), (3, -1))
    # φ_0 = e^{-u/2}
    expected = 3 * 2 * (1 - math.exp(-1 / 8)) - 2 * (math.exp(-1 / 8) - math.exp(-1 / 2))
    assert quadrature.inner_product(system, 0, a) == pytest.approx(expected, rel=1e-12)


def test_counterexample_atom_is_orthogonal_to_constants_on_jacobi_edge():
    # For p = 1 the atom has zero mean, so its pairing with φ_0 of the Jacobi system α = β = -1/2 vanishes.
    system = SystemSpec.build(Family.JACOBI, alpha=-0.5, beta=-0.5)
    a = build_counterexample_atom(1, 1., Fraction(1, 10))
    assert abs(quadrature.inner_product(system, 0, a)) < 1e-13


def test_inner_products_outside_domain():
    system = SystemSpec.build(Family.JACOBI, alpha=0., beta=0.)
    a = PiecewiseConstant1D((0, 4), (1,))
    with pytest.raises(DomainError):
        quadrature.inner_products(system, a, 3)


def test_coefficient_cache(tmp_path):
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=0.5)
    a = build_counterexample_atom(Fraction(1, 2), 4., Fraction(1, 16))
    path = tmp_path / 'coefficients.json'
    cache = quadrature.CoefficientCache(str(path))
    first = cache.get(system, a, 12)
    assert first.shape == (13,)
    assert len(cache) == 1
    np.testing.assert_array_equal(cache.get(system, a, 5), first[:6])
    cache.save()

    reloaded = quadrature.CoefficientCache(str(path))
    assert len(reloaded) == 1
    np.testing.assert_array_equal(reloaded.get(system, a, 12), first)
    np.testing.assert_allclose(quadrature.inner_products(system, a, 12), first, rtol=0, atol=1e-14)

    extended = reloaded.get(system, a, 20)
    np.testing.assert_allclose(extended[:13], first, atol=1e-10)


def test_coefficients_tensor():
    system = SystemSpec.build(Family.LAGUERRE_STD, alpha=(0., 1.), d=2)
    a = build_counterexample_atom(1, 2., Fraction(1, 8))
    product = ProductAtom((a, a))
    expected = (quadrature.inner_product(system.coordinate(0), 3, a)
                * quadrature.inner_product(system.coordinate(1), 2, a))
    assert quadrature.coefficients_tensor(system, product, (3, 2)) == pytest.approx(expected, rel=1e-10)
