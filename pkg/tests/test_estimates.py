import math

import numpy as np
import pytest

from hardylab import bases, estimates
from hardylab.bases import Family, SystemSpec
from hardylab.framework.errors import DomainError, ShapeError, UnsupportedError


def std(alpha, d=1):
    return SystemSpec.build(Family.LAGUERRE_STD, alpha=alpha, d=d)


def hermite(alpha):
    return SystemSpec.build(Family.LAGUERRE_HERMITE, alpha=alpha)


def jacobi(alpha, beta):
    return SystemSpec.build(Family.JACOBI, alpha=alpha, beta=beta)


def test_stability_rule():
    assert estimates._stable(1., 1.5)
    assert not estimates._stable(1., 2.5)
    assert estimates._stable(0., 0.)
    assert not estimates._stable(0., 1e-3)
    assert not estimates._stable(math.inf, 1.)
    assert estimates._doubled([8, 4, 4]) == ([4, 8], [4, 8, 16])


def test_laguerre_regime_bound_pieces():
    # k = 0, alpha = 0: k' = 2
    u = np.array([0.25, 1., 2., 10.])
    expected = [1., 2 ** -0.25, 2 ** -0.25 * 2 ** (-1 / 12), math.exp(-0.5)]
    np.testing.assert_allclose(estimates.laguerre_regime_bound(0, 0., u), expected, rtol=1e-14)


def test_jacobi_regime_bound_pieces():
    theta = np.array([0.5, 1.5, math.pi - 0.5])
    expected = [0.5 ** 1.5, 1., 0.5 ** 0.75]
    np.testing.assert_allclose(estimates.jacobi_regime_bound(0, 1., 0.25, theta), expected, rtol=1e-14)


@pytest.mark.parametrize('system', [std(0.), std(1.5), jacobi(0.5, -0.5), hermite(0.),
                                    SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0.5)])
def test_regime_check_runs(system):
    check = estimates.check_regime_bounds(system, [4, 8])
    assert check.name == 'regime'
    assert math.isfinite(check.worst_ratio)
    assert check.worst_ratio > 0
    assert set(check.table['k']) == {4, 8, 16}
    summary = check.summary()
    assert summary['passed'] == check.passed
    assert summary['worst_ratio_doubled'] >= check.worst_ratio


def test_regime_check_with_given_points():
    check = estimates.check_regime_bounds(std(0.), [2], u_grid=[0.1, 1., 5.])
    assert len(check.table) == 6
    values = check.table[check.table['k'] == 2]['value'].to_numpy()
    np.testing.assert_allclose(values, np.abs(bases.eval_1d(std(0.), 2, np.array([0.1, 1., 5.]))))


def test_sign_size_for_standard_laguerre():
    check = estimates.check_sign_size(std(2.), 1, 0, [4, 8])
    assert check.extra['c'] is not None
    assert math.isfinite(check.worst_ratio)
    assert check.extra['ratio_min'] > 0
    assert check.table['sign_ok'].all()


def test_predicted_sign_size():
    u = np.array([0.01, 0.02])
    sign, size = estimates.predicted_sign_size(std(2.), 1, 0, 3, u)
    assert sign == -1
    np.testing.assert_allclose(size, 4. ** 2 * np.ones(2))
    sign, size = estimates.predicted_sign_size(std(2.), 1, 2, 3, u)
    assert sign == 1
    np.testing.assert_allclose(size, 4. * u)
    sign, size = estimates.predicted_sign_size(hermite(0.), 3, 0, 3, u)
    assert sign == 1
    np.testing.assert_allclose(size, 4. ** 2 * u)


def test_sign_size_errors():
    with pytest.raises(UnsupportedError):
        estimates.check_sign_size(SystemSpec.build(Family.GENERALIZED_HERMITE, lam=1.), 1, 0, [4])
    with pytest.raises(DomainError):
        estimates.check_sign_size(std(2.), 4, 0, [4])


@pytest.mark.parametrize('system,j', [(std(0.), 1), (std(2.), 2), (hermite(0.5), 1), (jacobi(0., 0.), 1)])
def test_derivative_sup_check_runs(system, j):
    check = estimates.check_derivative_sup(system, j, [4, 8])
    assert list(check.table['k']) == [4, 8, 16]
    assert np.all(check.table['sup'] > 0)
    assert math.isfinite(check.worst_ratio)


def test_derivative_sup_parameter_range():
    with pytest.raises(DomainError):
        estimates.check_derivative_sup(std(1.), 1, [4])
    with pytest.raises(UnsupportedError):
        estimates.check_derivative_sup(SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0.), 1, [4])
    assert estimates._derivative_power(hermite(0.), 2) == pytest.approx(11 / 12)


def test_holder_bound():
    assert estimates.holder_bound(std(1.), 0, 3, 0.01) == pytest.approx(4 * 0.01 + 4 ** 0.5 * 0.01 ** 0.5)
    assert estimates.holder_bound(hermite(1.), 1, 3, 0.01) == pytest.approx(4 ** 0.75 * 0.01 + 2 * 0.1)
    with pytest.raises(DomainError):
        estimates.holder_bound(std(3.), 0, 3, 0.01)
    with pytest.raises(DomainError):
        estimates.holder_bound(hermite(1.), 0, 3, 0.01)
    with pytest.raises(UnsupportedError):
        estimates.holder_bound(SystemSpec.build(Family.GENERALIZED_HERMITE, lam=0.), 0, 3, 0.01)


def test_holder_check():
    check = estimates.check_holder_modulus(hermite(0.), 0, [4, 8])
    assert math.isfinite(check.worst_ratio)
    assert len(check.table) == 3 * len(estimates.DEFAULT_HOLDER_U) * len(estimates.DEFAULT_HOLDER_H)
    check = estimates.check_holder_modulus(jacobi(0.25, 0.), 0, [4], pairs=[(0.5, 0.6), (1., 1.01)])
    assert len(check.table) == 4
    with pytest.raises(ShapeError):
        estimates.check_holder_modulus(hermite(0.), 0, [4], pairs=[(0.1, 0.2, 0.3)])


def test_kernel_holder_check():
    check = estimates.check_kernel_holder(hermite(0.), 0, [0.5, 0.7], pairs=[(0.5, 0.6), (1., 1.05)])
    assert sorted(set(check.table['r'])) == pytest.approx([0.5, 0.7, 0.75, 0.85])
    assert math.isfinite(check.worst_ratio)
    assert np.all(check.table['lhs'] > 0)
    with pytest.raises(UnsupportedError):
        estimates.check_kernel_holder(std(0.), 0, [0.5])
    with pytest.raises(DomainError):
        estimates.check_kernel_holder(hermite(1.), 0, [0.5])
    with pytest.raises(DomainError):
        estimates.check_kernel_holder(hermite(0.), 0, [1.])


def test_kernel_holder_bound():
    expected = 0.25 ** -1.25 * 0.01 + 0.25 ** -1. * 0.01 ** 0.5
    assert estimates.kernel_holder_bound(hermite(1.), 1, 0.75, 0.01) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(4 * math.sqrt(2) * 0.01 + 0.4)
    np.testing.assert_allclose(estimates.kernel_holder_bound(hermite(1.), 1, 0.75, np.array([-0.01, 0.01])),
                               [expected, expected])
    r = np.array([0.5, 0.9, 0.99, 0.999])
    assert np.all(np.diff(estimates.kernel_holder_bound(hermite(0.), 0, r, 0.1)) > 0)
    with pytest.raises(UnsupportedError):
        estimates.kernel_holder_bound(jacobi(0., 0.), 0, 0.5, 0.1)
    with pytest.raises(DomainError):
        estimates.kernel_holder_bound(hermite(2.), 1, 0.5, 0.1)


def test_delta_set():
    assert estimates.delta_set(std(1.), 0) == [0.5, 1.]
    assert estimates.delta_set(std(2.), 0) == [1.]
    assert estimates.delta_set(jacobi(0., 0.2), 0) == pytest.approx([0.5, 0.7, 1.])
    assert estimates.delta_set(SystemSpec.build(Family.GENERALIZED_HERMITE, lam=1.5), 1) == [0.5, 1.]
    assert estimates.delta_set(hermite(1.25), 1) == pytest.approx([0.75, 1.])


def test_cond_c_rhs():
    value = estimates.cond_c_rhs(std(1.), 0, 0.75, 0.1)
    expected = 0.25 ** (-(1 + 1) * 0.5) * 0.1 ** 0.5 + 0.25 ** (-(1 + 2) * 0.5) * 0.1
    assert value == pytest.approx(expected)


def test_cond_c_parseval_factorizes():
    # With x_2 = x'_2 the squared remainder of order 0 is a product of one-dimensional sums.
    system = std(0., d=2)
    x, x_prime = np.array([1., 2.]), np.array([1.2, 2.])
    check = estimates.check_cond_c(system, 0, [0.5], [(x, x_prime)])
    assert len(check.table) == 2
    for _, row in check.table.iterrows():
        r = row['r']
        M = estimates._parseval_order(r, 0)
        one_d = std(0.)
        weights = r ** (2 * np.arange(M + 1))
        difference = bases.eval_rows(one_d, M, [1.])[:, 0] - bases.eval_rows(one_d, M, [1.2])[:, 0]
        second = bases.eval_rows(one_d, M, [2.])[:, 0]
        expected = math.sqrt(np.sum(weights * difference ** 2) * np.sum(weights * second ** 2))
        assert row['lhs'] == pytest.approx(expected, rel=1e-10)
        assert row['distance'] == pytest.approx(0.2)


@pytest.mark.parametrize('k', [0, 1])
def test_cond_c_methods_agree(k):
    system = hermite(0.5)
    pairs = [(np.array([1.]), np.array([1.1]))]
    parseval = estimates.check_cond_c(system, k, [0.5], pairs, method='parseval')
    quadrature = estimates.check_cond_c(system, k, [0.5], pairs, method='quadrature', abs_tol=1e-12, rel_tol=1e-8)
    np.testing.assert_allclose(quadrature.table['lhs'], parseval.table['lhs'], rtol=1e-5)
    assert parseval.extra['predicted_slope'] == pytest.approx(-(1 + 2 * k + 2 * min(estimates.delta_set(system, k)))
                                                               / 4)


def test_cond_c_errors():
    system = std(0.)
    with pytest.raises(DomainError):
        estimates.check_cond_c(system, 0, [0.5], [(np.array([1.]), np.array([1.7]))])
    with pytest.raises(ShapeError):
        estimates.check_cond_c(system, 0, [0.5], [(np.array([1., 2.]), np.array([1., 2.1]))])
    with pytest.raises(DomainError):
        estimates.check_cond_c(system, 0, [0.5], [(np.array([1.]), np.array([1.1]))], method='other')
    with pytest.raises(UnsupportedError):
        estimates.check_cond_c(jacobi(0., 0.), 0, [0.5], [(np.array([1.]), np.array([1.1]))], method='quadrature')
