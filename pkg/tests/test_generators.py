import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special
from scipy.optimize import bisect

from ttesum import (
    CATALOG, DomainError, custom_generator, make_exponential, make_gumbel_barnett,
    make_pareto_II, make_translated_erlang, make_truncated_normal, validate_generator,
)
from ttesum.generators import TRUNC_NORMAL_C

from conftest import central_diff


def test_boundary_value(generator):
    assert generator.survival(0.0) == pytest.approx(1.0, abs=1e-12)


def test_density_is_minus_derivative(generator):
    t = np.array([0.05, 0.3, 0.8, 1.7])
    np.testing.assert_allclose(central_diff(generator.survival, t, 1e-6),
                               -generator.density(t), rtol=1e-6, atol=1e-10)


def test_density_derivative(generator):
    t = np.array([0.05, 0.3, 0.8, 1.7])
    np.testing.assert_allclose(central_diff(generator.density, t, 1e-6),
                               generator.density_derivative(t), rtol=1e-5, atol=1e-9)


def test_survival_inverse_round_trip(generator):
    u = np.geomspace(1e-8, 1 - 1e-9, 40)
    np.testing.assert_allclose(generator.survival(generator.survival_inverse(u)), u,
                               rtol=1e-10)


def test_density_inverse_round_trip(generator):
    if generator.density_inverse is None:
        pytest.skip("no analytic density inverse")
    t = np.array([0.01, 0.2, 0.7, 2.0])
    np.testing.assert_allclose(generator.density_inverse(generator.density(t)), t,
                               rtol=1e-9, atol=1e-12)


def test_log_survival(generator):
    t = np.array([0.0, 0.4, 2.0])
    np.testing.assert_allclose(generator.log_survival(t), np.log(generator.survival(t)),
                               atol=1e-12)


def test_catalog_validates(generator):
    report = validate_generator(generator)
    assert report.ok, report.failures


def test_exponential():
    G = make_exponential()
    assert G.survival_inverse(G.survival(2.5)) == pytest.approx(2.5, abs=1e-12)


def test_pareto_values():
    G = make_pareto_II(2.0)
    assert G.survival(1.0) == 0.25
    assert G.survival_inverse(0.25) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError, match="gamma must be positive"):
        make_pareto_II(-1.0)


def test_pareto_clayton_tau():
    gamma = 2.664557
    theta = 1 / gamma
    assert theta / (2 + theta) == pytest.approx(1 / (1 + 2 * gamma))
    assert 1 / (1 + 2 * gamma) == pytest.approx(0.158, abs=5e-4)


def test_truncated_normal_constant():
    assert TRUNC_NORMAL_C == pytest.approx(6.302974, abs=1e-6)
    assert TRUNC_NORMAL_C * special.ndtr(-1.0) == pytest.approx(1.0, abs=1e-15)


def test_truncated_normal_density_inverse_against_bisection():
    G = make_truncated_normal()
    y = G.density(0.7)
    oracle = bisect(lambda t: G.density(t) - y, 0.0, 10.0, xtol=1e-15)
    assert G.density_inverse(y) == pytest.approx(oracle, abs=1e-8)
    assert G.density_inverse(y) == pytest.approx(0.7, abs=1e-8)
    # the explicit inverse formula
    disp = -1 + math.sqrt(2 * math.log(TRUNC_NORMAL_C) - math.log(2 * math.pi) - 2 * math.log(y))
    assert G.density_inverse(y) == pytest.approx(disp, abs=1e-12)


def test_truncated_normal_density_inverse_domain():
    G = make_truncated_normal()
    with pytest.raises(DomainError):
        G.density_inverse(2 * G.density(0.0))


def test_translated_erlang():
    G = make_translated_erlang()
    assert G.survival(0.0) == 1.0
    assert G.density(0.0) == pytest.approx(0.5)
    oracle = bisect(lambda t: G.survival(t) - 0.5, 0.0, 10.0, xtol=1e-14)
    assert G.survival(G.survival_inverse(0.5)) == pytest.approx(0.5, abs=1e-10)
    assert G.survival_inverse(0.5) == pytest.approx(oracle, abs=1e-10)


def test_gumbel_barnett():
    G = make_gumbel_barnett(1.0)
    assert G.survival(0.0) == 1.0
    assert G.survival_inverse(G.survival(0.5)) == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(DomainError):
        make_gumbel_barnett(1.5)
    with pytest.raises(DomainError):
        make_gumbel_barnett(0.0)


def test_gumbel_barnett_convexity_on_short_grid():
    report = validate_generator(make_gumbel_barnett(1.0), t_max=5.0)
    assert report.convexity_violations == 0
    assert report.max_density_derivative <= 0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20.0))
def test_pareto_family_validates(gamma):
    assert validate_generator(make_pareto_II(gamma), grid_size=64).ok


def test_clamped_linear_generator_fails_only_tail():
    G = custom_generator(
        "linear",
        survival=lambda t: np.clip(1 - t, 0.0, 1.0),
        density=lambda t: np.where(t < 1, 1.0, 0.0),
        density_derivative=lambda t: np.zeros_like(t),
        survival_inverse=lambda u: 1 - u,
        support_hint=1.0,
    )
    report = validate_generator(G)
    assert report.convexity_violations == 0
    assert not report.tail_ok
    assert len(report.failures) == 1 and "tail" in report.failures[0]


def test_custom_generator_numeric_fallbacks():
    G = custom_generator("exp2", survival=lambda t: np.exp(-2 * t),
                         density=lambda t: 2 * np.exp(-2 * t))
    assert G.survival_inverse(0.5) == pytest.approx(math.log(2) / 2, abs=1e-10)
    assert G.density_derivative(0.3) == pytest.approx(-4 * math.exp(-0.6), rel=1e-6)
    assert validate_generator(G).ok


def test_catalog_keys():
    assert set(CATALOG) == {"exponential", "pareto2", "trunc_normal",
                            "translated_erlang", "gumbel_barnett"}
