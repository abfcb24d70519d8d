import math

import numpy as np
import pytest
from scipy import integrate as spi

from ttesum import (
    BOTTOM, CENTERED, S_GIVEN_X1, X1_GIVEN_S, ConditioningError, DomainError, TTEModel,
    band_levels, cond_df_s_given_x1, cond_df_x1_given_s, cond_quantile_s_given_x1,
    cond_quantile_x1_given_s, cond_survival_quantile_s_given_x1,
    cond_survival_s_given_x1, conditional_law, confidence_band, exponential_baseline,
    gk_model, joint_pdf_x1_s, make_exponential, make_gumbel_barnett, make_pareto_II,
    make_truncated_normal, median_regression, quantile_curve,
    stochastic_monotonicity_probe,
)
from ttesum.conditional import ANALYTIC, ROOT_FIND, normalize_direction
from ttesum.generators import TRUNC_NORMAL_C
from ttesum.model import generator_baseline

LEVELS = [0.05, 0.25, 0.5, 0.75, 0.95]


def test_normalize_direction():
    assert normalize_direction("s-given-x1") == S_GIVEN_X1
    assert normalize_direction("X1_given_S") == X1_GIVEN_S
    with pytest.raises(DomainError):
        normalize_direction("x2-given-s")


def test_s_given_x1_gk_formula(generator):
    m = gk_model(generator, 2.0, 1.0)
    x = 0.4
    s = np.linspace(x, 3, 9)
    np.testing.assert_allclose(cond_survival_s_given_x1(m, s, x),
                               generator.density(x + s) / generator.density(2 * x),
                               rtol=1e-12)
    assert cond_df_s_given_x1(m, x, x) == pytest.approx(0.0, abs=1e-15)


def test_s_given_x1_ratio_of_joint_density(generator):
    # Fbar(s|x) = int_s^inf g(x, t) dt / f1(x)
    m = gk_model(generator, 2.0, 1.0)
    x, s = 0.3, 0.9
    num = spi.quad(lambda t: joint_pdf_x1_s(m, x, t), s, np.inf, epsabs=1e-13)[0]
    den = spi.quad(lambda t: joint_pdf_x1_s(m, x, t), x, np.inf, epsabs=1e-13)[0]
    assert cond_survival_s_given_x1(m, s, x) == pytest.approx(num / den, rel=1e-7)


def test_ex3_s_given_x1(ex3_model):
    x = 0.7
    s = np.linspace(x, 6, 30)
    disp = (1 + x + s) / (1 + 2 * x) * np.exp(-(s - x))
    np.testing.assert_allclose(cond_survival_s_given_x1(ex3_model, s, x), disp, rtol=1e-12)


@pytest.mark.parametrize("alpha, beta", [(2.0, 1.0), (1.0, 1.0), (1.0, 3.0)])
@pytest.mark.parametrize("direction", [S_GIVEN_X1, X1_GIVEN_S])
def test_quantile_round_trip(generator, alpha, beta, direction):
    m = gk_model(generator, alpha, beta)
    law = conditional_law(m, direction)
    for c in (0.1, 0.5, 1.5):
        for q in LEVELS:
            assert law.df(law.quantile(q, c), c) == pytest.approx(q, abs=1e-8)


def test_survival_level_form(generator):
    m = gk_model(generator, 2.0, 1.0)
    for v in (0.1, 0.5, 0.9):
        t = cond_survival_quantile_s_given_x1(m, v, 0.3)
        assert cond_survival_s_given_x1(m, t, 0.3) == pytest.approx(v, abs=1e-10)
        assert cond_quantile_s_given_x1(m, 1 - v, 0.3) == pytest.approx(t, rel=1e-12)


def test_quantile_near_one_tends_to_x(generator):
    m = gk_model(generator, 2.0, 1.0)
    assert cond_survival_quantile_s_given_x1(m, 1 - 1e-12, 0.5) == pytest.approx(0.5, abs=1e-6)


def test_method_tags():
    tn = gk_model(make_truncated_normal(), 2.0, 1.0)
    gb = gk_model(make_gumbel_barnett(1.0), 3.0, 1.0)
    assert conditional_law(tn, S_GIVEN_X1).method_tag == ANALYTIC
    assert conditional_law(gb, S_GIVEN_X1).method_tag == ROOT_FIND
    assert conditional_law(gb, X1_GIVEN_S).method_tag == ROOT_FIND


def test_ex2_quantile_uses_density_inverse():
    G = make_truncated_normal()
    m = TTEModel(G, generator_baseline(G), generator_baseline(G))
    x, v = 0.4, 0.3

    def ginv(y):
        return -1 + math.sqrt(2 * math.log(TRUNC_NORMAL_C) - math.log(2 * math.pi)
                              - 2 * math.log(y))

    R = lambda t: -math.log(G.survival(t))
    r1 = R(x)
    target = ginv(v * G.density(r1)) - r1
    # R2^{-1}(y) = Gbar^{-1}(e^{-y})
    expected = x + G.survival_inverse(math.exp(-target))
    assert conditional_law(m, S_GIVEN_X1).method_tag == ANALYTIC
    assert cond_survival_quantile_s_given_x1(m, v, x) == pytest.approx(expected, rel=1e-10)


def test_x1_given_s_schur_constant(generator):
    m = gk_model(generator, 1.0, 1.0)
    x = np.linspace(0, 2, 9)
    np.testing.assert_allclose(cond_df_x1_given_s(m, x, 2.0), x / 2.0, atol=1e-15)
    assert cond_df_x1_given_s(m, 1.0, 2.0) == 0.5
    assert cond_quantile_x1_given_s(m, 0.5, 3.0) == 1.5


def test_x1_given_s_full_mass(generator):
    m = gk_model(generator, 2.0, 1.0)
    assert cond_df_x1_given_s(m, 1.3, 1.3) == pytest.approx(1.0, abs=1e-12)


def test_x1_given_s_ratio_of_joint_density(generator):
    m = gk_model(generator, 2.0, 1.0)
    x, s = 0.3, 1.1
    num = spi.quad(lambda t: joint_pdf_x1_s(m, t, s), 0, x, epsabs=1e-14)[0]
    den = spi.quad(lambda t: joint_pdf_x1_s(m, t, s), 0, s, epsabs=1e-14)[0]
    assert cond_df_x1_given_s(m, x, s) == pytest.approx(num / den, rel=1e-8)


def test_ex4_x1_given_s(ex4_model):
    s = 0.9
    x = np.linspace(0, s, 30)
    disp = ((np.exp(2 * x + s + 1 - np.exp(2 * x + s)) - np.exp(s + 1 - np.exp(s)))
            / (np.exp(3 * s + 1 - np.exp(3 * s)) - np.exp(s + 1 - np.exp(s))))
    np.testing.assert_allclose(cond_df_x1_given_s(ex4_model, x, s), disp, atol=1e-12)


def test_ex1_displayed_inverse():
    g, a, b = 2.664557, 1.548042, 0.6925677
    m = gk_model(make_pareto_II(g), a, b)
    s = np.linspace(0.1, 5, 20)
    for q in LEVELS:
        disp = (-1 - b * s + (q * (1 + a * s) ** (-g - 1)
                              + (1 - q) * (1 + b * s) ** (-g - 1)) ** (-1 / (g + 1))) / (a - b)
        np.testing.assert_allclose(cond_quantile_x1_given_s(m, q, s), disp, atol=1e-10)


def test_general_tte_x1_given_s_round_trip():
    G = make_pareto_II(2.0)
    m = TTEModel(G, exponential_baseline(2.0), generator_baseline(make_truncated_normal()))
    for s in (0.3, 1.2):
        for q in (0.1, 0.5, 0.9):
            x = cond_quantile_x1_given_s(m, q, s)
            assert cond_df_x1_given_s(m, x, s) == pytest.approx(q, abs=1e-8)


def test_degenerate_conditioning_raises():
    m = gk_model(make_truncated_normal(), 1.0, 1.0)
    with pytest.raises(ConditioningError):
        cond_survival_s_given_x1(m, 50.0, 45.0)
    with pytest.raises(DomainError):
        cond_quantile_x1_given_s(m, 1.2, 1.0)


def test_median_regression_schur_constant():
    m = gk_model(make_pareto_II(2.0), 1.0, 1.0)
    grid = np.linspace(0.1, 4, 20)
    np.testing.assert_allclose(median_regression(m, X1_GIVEN_S, grid).grid[1], grid / 2)


def test_ex4_median_rises_then_falls(ex4_model):
    grid = np.linspace(0.01, 2.0, 200)
    med = median_regression(ex4_model, X1_GIVEN_S, grid).grid[1]
    peak = int(np.argmax(med))
    assert 0 < peak < grid.size - 1
    assert med[0] < med[peak] > med[-1]


def test_ex2_median_above_diagonal():
    G = make_truncated_normal()
    m = TTEModel(G, generator_baseline(G), generator_baseline(G))
    grid = np.linspace(0, 1.5, 50)
    assert np.all(median_regression(m, S_GIVEN_X1, grid).grid[1] >= grid)


def test_band_levels():
    assert band_levels(0.9) == pytest.approx((0.05, 0.95))
    assert band_levels(0.5, BOTTOM) == (None, 0.5)
    with pytest.raises(DomainError):
        band_levels(1.0)


def test_bands(generator):
    m = gk_model(generator, 2.0, 1.0)
    grid = np.linspace(0.05, 1.5, 15)
    for direction in (S_GIVEN_X1, X1_GIVEN_S):
        b50 = confidence_band(m, direction, 0.5, CENTERED, grid)
        b90 = confidence_band(m, direction, 0.9, CENTERED, grid)
        assert np.all(b90.lower.grid[1] <= b50.lower.grid[1])
        assert np.all(b50.lower.grid[1] <= b50.upper.grid[1])
        assert np.all(b50.upper.grid[1] <= b90.upper.grid[1])
    bottom = confidence_band(m, S_GIVEN_X1, 0.5, BOTTOM, grid)
    np.testing.assert_array_equal(bottom.lower.grid[1], grid)
    np.testing.assert_array_equal(bottom.upper.grid[1],
                                  median_regression(m, S_GIVEN_X1, grid).grid[1])
    with pytest.raises(DomainError):
        confidence_band(m, X1_GIVEN_S, 0.5, BOTTOM, grid)


def test_bottom_90_is_survival_level_tenth():
    G = make_truncated_normal()
    m = TTEModel(G, generator_baseline(G), generator_baseline(G))
    grid = np.array([0.2, 0.6])
    band = confidence_band(m, S_GIVEN_X1, 0.9, BOTTOM, grid)
    expected = [cond_survival_quantile_s_given_x1(m, 0.1, x) for x in grid]
    np.testing.assert_allclose(band.upper.grid[1], expected, rtol=1e-12)


def test_quantile_curve_sample(ex1_model):
    curve = quantile_curve(ex1_model, X1_GIVEN_S, 0.25, [0.5, 1.0])
    c, v = curve.grid
    np.testing.assert_allclose(curve(c), v)
    assert curve.q == 0.25


def test_probe_schur_constant_ordered():
    m = gk_model(make_pareto_II(2.0), 1.0, 1.0)
    rep = stochastic_monotonicity_probe(m, X1_GIVEN_S, [0.5, 1, 2], np.linspace(0, 2, 101))
    assert rep.stochastically_increasing


def test_probe_independence_ordered():
    m = gk_model(make_exponential(), 1.0, 2.0)
    rep = stochastic_monotonicity_probe(m, X1_GIVEN_S, [0.5, 1, 2], np.linspace(0, 2, 101))
    assert rep.stochastically_increasing
    rep = stochastic_monotonicity_probe(m, S_GIVEN_X1, [0.5, 1, 2], np.linspace(0, 5, 101))
    assert rep.stochastically_increasing


def test_probe_ex4_crossings(ex4_model):
    rep = stochastic_monotonicity_probe(ex4_model, X1_GIVEN_S, [0.2, 0.4, 0.6, 0.8, 1, 2],
                                        np.linspace(0, 2, 401))
    assert not rep.stochastically_increasing
    assert (0.6, 2.0) in rep.crossing_pairs()
