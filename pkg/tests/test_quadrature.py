import math

import mpmath
import numpy as np
import pytest

from sbkernels.errors import DomainError, MeasureMismatchError
from sbkernels.groups import random_su2
from sbkernels.quadrature import (
    gaussian_moment,
    generalized_hermite,
    haar_invariance_check,
    haar_rule,
    left_translate,
    m_rule,
    omega_rule,
)
from sbkernels.reports import rng_stream
from sbkernels.su2 import character_of_nodes


@pytest.fixture(scope="module")
def haar():
    return haar_rule(16)


def gaussian(rule, t):
    return np.exp(-np.sum(rule.nodes**2, axis=1) / (2 * t))


def test_normalization_mu0():
    rule = omega_rule(0.0, 1.0, order=20)
    assert abs(rule.integrate(gaussian(rule, 1.0)) - 1) <= 1e-14


def test_second_moment_mu0():
    rule = omega_rule(0.0, 1.0, order=20)
    q = rule.nodes[:, 0]
    assert abs(rule.integrate(q**2 * gaussian(rule, 1.0)) - 1) <= 1e-13


def test_moment_ratio_mu1():
    # dgamma = |q|^2 exp(-q^2) dq: ratio Gamma(mu+3/2)/Gamma(mu+1/2) * t * 2 = 3/2
    rule = omega_rule(1.0, 0.5)
    q = rule.nodes[:, 0]
    w = rule.weights * np.exp(-(q**2))
    assert abs(np.dot(w, q**2) / w.sum() - 1.5) <= 1e-12


@pytest.mark.parametrize("mu", [0.0, 0.5, 1.0, 2.3])
@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_gauss_exactness_against_gamma_moments(mu, t):
    order = 32
    rule = omega_rule(mu, t, order)
    q = rule.nodes[:, 0]
    g = gaussian(rule, t)
    for k in range(order):
        exact = gaussian_moment(k, mu, t)
        assert abs(rule.integrate(q ** (2 * k) * g) - exact) <= 1e-12 * exact


def test_gaussian_moment_closed_form():
    # independent: ratio of integrals of |q|^{2mu + 2k} e^{-q^2/2t} and |q|^{2mu} e^{-q^2/2t}
    mu, t, k = 0.7, 1.3, 3
    with mpmath.workdps(30):
        num = mpmath.quad(lambda q: q ** (2 * mu + 2 * k) * mpmath.exp(-(q**2) / (2 * t)), [0, mpmath.inf])
        den = mpmath.quad(lambda q: q ** (2 * mu) * mpmath.exp(-(q**2) / (2 * t)), [0, mpmath.inf])
    assert gaussian_moment(k, mu, t) == pytest.approx(float(num / den), rel=1e-13)


def test_generalized_hermite_weights_sum():
    for mu in (0.0, 1.5):
        x, v = generalized_hermite(40, mu)
        assert np.all(np.diff(x) > 0)
        assert np.dot(v, np.exp(-(x**2))) == pytest.approx(math.gamma(mu + 0.5), rel=1e-14)


@pytest.mark.parametrize("order", [0, 3, 402])
def test_bad_orders(order):
    with pytest.raises(DomainError):
        omega_rule(0.0, 1.0, order)


def test_dimension_restrictions():
    with pytest.raises(DomainError):
        omega_rule(0.5, 1.0, 8, dim=2)
    rule = omega_rule(0.0, 1.0, 8, dim=3)
    assert rule.nodes.shape == (512, 3)
    assert rule.integrate(gaussian(rule, 1.0)) == pytest.approx(1.0, abs=1e-14)


def test_m_rule_mass_and_tag():
    rule = m_rule(0.5, 1.0)
    assert rule.weights.sum() > 0
    # int exp(-q^2/t) d omega = 2^{-(mu+1/2)}
    assert rule.weights.sum() == pytest.approx(2 ** -1.0, rel=1e-14)
    rule.require("m", 0.5, 1.0)
    with pytest.raises(MeasureMismatchError):
        rule.require("omega", 0.5, 1.0)
    with pytest.raises(MeasureMismatchError):
        rule.require("m", 0.5, 2.0)


def test_b_isometry_spot_check():
    mu, t = 0.5, 1.0
    om, m = omega_rule(mu, t), m_rule(mu, t)
    f = lambda q: 1 + q[:, 0] ** 2  # noqa: E731
    lhs = m.integrate(np.abs(f(m.nodes)) ** 2)
    rhs = om.integrate(np.abs(gaussian(om, t) * f(om.nodes)) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_doubling_stability():
    mu, t = 1.0, 1.0
    f = lambda q: np.cos(q[:, 0]) * np.exp(-(q[:, 0] ** 2) / (2 * t))  # noqa: E731
    a, b = (omega_rule(mu, t, n) for n in (32, 64))
    assert abs(a.integrate(f(a.nodes)) - b.integrate(f(b.nodes))) <= 1e-12


def test_haar_mass(haar):
    assert len(haar) == 16 * 32 * 32
    assert abs(haar.weights.sum() - 1) <= 1e-14
    np.testing.assert_allclose(np.abs(haar.nodes[:, 0]) ** 2 + np.abs(haar.nodes[:, 1]) ** 2, 1, atol=1e-14)


def test_haar_character_orthogonality(haar):
    assert abs(haar.integrate(character_of_nodes(1, haar.nodes))) <= 1e-8
    assert abs(haar.integrate(character_of_nodes(0.5, haar.nodes) ** 2) - 1) <= 1e-8


def test_haar_invariance(haar):
    rng = rng_stream(11, 0)
    for _ in range(3):
        c = random_su2(rng)
        assert haar_invariance_check(haar, c, lambda n: np.ones(len(n))) == 0
        assert haar_invariance_check(haar, c, lambda n: character_of_nodes(1, n)) <= 1e-8
        assert haar_invariance_check(haar, c, lambda n: n[:, 0].real ** 2) <= 1e-7


def test_haar_square_of_re_a_against_finer_rule(haar):
    # E[Re(a)^2] = 1/4 under Haar measure; compare with a doubled resolution too
    f = lambda n: n[:, 0].real ** 2  # noqa: E731
    fine = haar_rule(32)
    assert abs(haar.integrate(f(haar.nodes)) - fine.integrate(f(fine.nodes))) <= 1e-12
    assert haar.integrate(f(haar.nodes)) == pytest.approx(0.25, abs=1e-13)


def test_left_translate_stays_on_group(haar):
    moved = left_translate(random_su2(rng_stream(11, 1)), haar.nodes)
    np.testing.assert_allclose(np.abs(moved[:, 0]) ** 2 + np.abs(moved[:, 1]) ** 2, 1, atol=1e-13)


def test_haar_rule_resolution_guard():
    with pytest.raises(DomainError):
        haar_rule(3)


def test_rules_are_frozen(haar):
    with pytest.raises(ValueError):
        haar.weights[0] = 1.0


def test_csv_dump():
    text = omega_rule(0.0, 1.0, 4).to_csv().splitlines()
    assert text[0] == "q0,weight"
    assert len(text) == 5
    row = [float(v) for v in text[1].split(",")]
    assert row[1] > 0
    assert haar_rule(4).to_csv().splitlines()[0] == "a_re,a_im,b_re,b_im,weight"
