import math

import numpy as np
import pytest

from ttesum import (
    GKParams, TTEModel, DomainError, distortion, exponential_baseline, gk_as_tte,
    gk_model, joint_pdf, joint_survival, make_exponential, make_pareto_II,
    make_translated_erlang, make_truncated_normal, marginal_pdf, marginal_survival,
    marginal_hazard, survival_copula,
)
from ttesum._numerics import integrate
from ttesum.model import generator_baseline, univariate_distortion


def test_independence_distortion():
    assert distortion(make_exponential(), 0.3, 0.7) == pytest.approx(0.21, abs=1e-15)


def test_univariate_distortion(generator):
    u = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(distortion(generator, u, 1.0), generator.survival(-np.log(u)))
    np.testing.assert_allclose(univariate_distortion(generator, u),
                               generator.survival(-np.log(u)))


def test_pareto_distortion_value():
    assert distortion(make_pareto_II(2.0), 0.5, 0.5) == pytest.approx(
        (1 + math.log(4)) ** -2, abs=1e-15)


def test_joint_survival_gk(generator):
    m = gk_model(generator, 2.0, 1.0)
    x1, x2 = np.meshgrid(np.linspace(0, 2, 10), np.linspace(0, 2, 10))
    np.testing.assert_allclose(joint_survival(m, x1, x2), generator.survival(2 * x1 + x2),
                               atol=1e-12)
    assert joint_survival(m, 0.0, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_translated_erlang_joint_survival():
    # Gbar(t) = (2 + t)/2 e^{-t} evaluated at 2*1 + 1
    m = gk_model(make_translated_erlang(), 2.0, 1.0)
    assert joint_survival(m, 1.0, 1.0) == pytest.approx(2.5 * math.exp(-3), rel=1e-14)


def test_pareto_gk_joint_survival():
    m = gk_as_tte(make_pareto_II(2.0), GKParams(2.0, 1.0))
    assert joint_survival(m, 1.0, 1.0) == pytest.approx(1 / 16)


def test_independence_pdf():
    m = gk_model(make_exponential(), 1.0, 1.0)
    assert joint_pdf(m, 0.4, 0.9) == pytest.approx(math.exp(-1.3), rel=1e-14)


def test_gk_pdf_is_second_derivative(generator):
    m = gk_model(generator, 2.0, 1.0)
    x1, x2 = 0.4, 0.9
    assert joint_pdf(m, x1, x2) == pytest.approx(
        -2.0 * generator.density_derivative(2 * x1 + x2), rel=1e-12)


def test_joint_pdf_mixed_partial(generator):
    m = gk_model(generator, 2.0, 1.0)
    h = 1e-4
    x1, x2 = 0.4, 0.9
    fd = (joint_survival(m, x1 + h, x2 + h) - joint_survival(m, x1 + h, x2 - h)
          - joint_survival(m, x1 - h, x2 + h) + joint_survival(m, x1 - h, x2 - h)) / (4 * h * h)
    assert fd == pytest.approx(joint_pdf(m, x1, x2), rel=1e-5)


def test_tte_with_generator_baselines_pdf():
    G = make_truncated_normal()
    m = TTEModel(G, generator_baseline(G), generator_baseline(G))
    h = 1e-4
    x1, x2 = 0.3, 0.5
    fd = (joint_survival(m, x1 + h, x2 + h) - joint_survival(m, x1 + h, x2 - h)
          - joint_survival(m, x1 - h, x2 + h) + joint_survival(m, x1 - h, x2 - h)) / (4 * h * h)
    assert fd == pytest.approx(joint_pdf(m, x1, x2), rel=1e-5)


def test_marginals(generator):
    m = gk_model(generator, 2.0, 1.0)
    x = np.linspace(0, 3, 7)
    np.testing.assert_allclose(marginal_survival(m, 1, x), generator.survival(2 * x))
    np.testing.assert_allclose(marginal_survival(m, 2, x), generator.survival(x))
    assert marginal_survival(m, 1, 0.0) == pytest.approx(1.0, abs=1e-12)
    total = integrate(lambda t: marginal_pdf(m, 1, t), 0.0, m.cutoff(1))
    assert total == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(marginal_hazard(m, 2, x[1:]),
                               marginal_pdf(m, 2, x[1:]) / marginal_survival(m, 2, x[1:]))


def test_pareto_marginal_value():
    m = gk_model(make_pareto_II(2.0), 2.0, 1.0)
    assert marginal_survival(m, 1, 1.0) == pytest.approx(1 / 9)


def test_copula_boundary(generator):
    m = gk_model(generator, 2.0, 1.0)
    u = np.array([0.05, 0.4, 0.9])
    np.testing.assert_allclose(survival_copula(m, u, 1.0), u, atol=1e-9)


def test_clayton_copula():
    gamma = 2.0
    m = gk_model(make_pareto_II(gamma), 2.0, 1.0)
    theta = 1 / gamma
    u, v = np.meshgrid(np.linspace(0.05, 0.95, 7), np.linspace(0.05, 0.95, 7))
    clayton = (u ** -theta + v ** -theta - 1) ** (-1 / theta)
    np.testing.assert_allclose(survival_copula(m, u, v), clayton, atol=1e-9)


def test_sklar_consistency(generator):
    m = gk_model(generator, 2.0, 1.0)
    x1, x2 = 0.3, 0.6
    c = survival_copula(m, marginal_survival(m, 1, x1), marginal_survival(m, 2, x2))
    assert c == pytest.approx(joint_survival(m, x1, x2), rel=1e-9)


def test_truncated_normal_copula_value():
    m = gk_model(make_truncated_normal(), 1.0, 1.0)
    c = survival_copula(m, 0.5, 0.5)
    assert 0 < c < 0.5


def test_gk_params_validation():
    with pytest.raises(DomainError):
        GKParams(0.0, 1.0)
    assert GKParams(1.0, 1.0).equal_rates
    with pytest.raises(DomainError):
        exponential_baseline(-1.0)
