"""Worked examples: Pareto/Clayton, truncated normal, translated Erlang and
Gumbel-Barnett models. Each ``example_N`` writes plot data as CSV files and
returns a list of :class:`Check` results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._io import columns_to_rows, write_csv
from .conditional import (
    BOTTOM, CENTERED, confidence_band, cond_df_x1_given_s,
    cond_quantile_x1_given_s, cond_survival_s_given_x1, median_regression,
    quantile_curve, stochastic_monotonicity_probe,
)
from .convolution import copula_convolution_oracle, sum_hazard, sum_pdf, sum_survival
from .generators import TRUNC_NORMAL_C, make_pareto_II
from .inference import (
    clayton_pareto_moments, empirical_coverage, fit_clayton_pareto,
    linear_quantile_fit, moment_table, sample_pairs,
)
from .model import gk_model, marginal_hazard, marginal_pdf
from .specfile import parse_model_spec

EXAMPLE_SPECS = {
    1: {"generator": {"kind": "pareto2", "gamma": 2},
        "model": {"type": "gk", "alpha": 2, "beta": 1}, "seed": 20210},
    2: {"generator": {"kind": "trunc_normal"},
        "model": {"type": "tte", "baseline1": {"kind": "generator"},
                  "baseline2": {"kind": "generator"}}, "seed": 20211},
    3: {"generator": {"kind": "translated_erlang"},
        "model": {"type": "gk", "alpha": 2, "beta": 1}, "seed": 20212},
    4: {"generator": {"kind": "gumbel_barnett", "theta": 1},
        "model": {"type": "gk", "alpha": 3, "beta": 1}, "seed": 20213},
}
FIGURE_SAMPLE_SIZE = 100


@dataclass
class Check:
    name: str
    value: float
    expected: float
    tol: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (f"{status}  {self.name}: value={self.value:.10g} "
                f"expected={self.expected:.10g} tol={self.tol:g}")
        return text + (f" ({self.note})" if self.note else "")


def close(name, value, expected, tol, note=""):
    value = float(value)
    return Check(name, value, float(expected), tol,
                 bool(abs(value - expected) <= tol), note)


def holds(name, flag: bool, note=""):
    return Check(name, float(bool(flag)), 1.0, 0.0, bool(flag), note)


def example_model(n: int):
    return parse_model_spec(json.dumps(EXAMPLE_SPECS[n]), f"example{n}").model


def _band_columns(m, direction, grid):
    med = median_regression(m, direction, grid).grid[1]
    b50 = confidence_band(m, direction, 0.5, CENTERED, grid)
    b90 = confidence_band(m, direction, 0.9, CENTERED, grid)
    return [med, b50.lower.grid[1], b50.upper.grid[1], b90.lower.grid[1], b90.upper.grid[1]]


BAND_HEADER = ["median", "lower50", "upper50", "lower90", "upper90"]


def _linear_columns(cond, target, grid):
    cols = []
    for q in (0.5, 0.25, 0.75, 0.05, 0.95):
        a, b = linear_quantile_fit(cond, target, q)
        cols.append(a + b * grid)
    return cols


def _is_non_monotone(h):
    d = np.diff(h)
    return bool(np.any(d > 0) and np.any(d < 0))


def example_1(out: Path) -> list:
    m = example_model(1)
    checks = []
    fit = clayton_pareto_moments(0.158, 0.3880776, 0.8674393)
    checks += [
        close("ex1 gamma_hat", fit.gamma_hat, 2.664557, 1e-5),
        close("ex1 alpha_hat", fit.alpha_hat, 1.548042, 1e-5),
        close("ex1 beta_hat", fit.beta_hat, 0.6925677, 1e-5),
        close("ex1 tau of gamma_hat", 1 / (1 + 2 * fit.gamma_hat), 0.158, 5e-4),
    ]
    s = np.linspace(0.0, 10.0, 201)
    displayed = 2 * (1 + s) ** -2 - (1 + 2 * s) ** -2
    checks.append(close("ex1 survival of S vs displayed form",
                        np.max(np.abs(sum_survival(m, s) - displayed)), 0.0, 1e-12))
    pdf_displayed = 2 * 1 * 2 / (2 - 1) * ((1 + s) ** -3 - (1 + 2 * s) ** -3)
    checks.append(close("ex1 density of S vs displayed form",
                        np.max(np.abs(sum_pdf(m, s) - pdf_displayed)), 0.0, 1e-12))
    oracle = max(abs(sum_survival(m, v) - copula_convolution_oracle(m, v))
                 for v in (0.5, 1.0, 2.0, 5.0))
    checks.append(close("ex1 copula oracle agreement", oracle, 0.0, 1e-6))

    grid = np.linspace(0.0, 6.0, 200)
    hs = sum_hazard(m, grid)
    h1 = marginal_hazard(m, 1, grid)
    h2 = marginal_hazard(m, 2, grid)
    checks.append(holds("ex1 hazard of S not monotone", _is_non_monotone(hs)))
    checks.append(holds("ex1 hazards of X1, X2 decreasing",
                        np.all(np.diff(h1) <= 0) and np.all(np.diff(h2) <= 0)))
    write_csv(out / "fig1_density.csv",
              ["s", "pdf_x1", "pdf_x2", "pdf_s", "hazard_x1", "hazard_x2", "hazard_s"],
              columns_to_rows(grid, marginal_pdf(m, 1, grid), marginal_pdf(m, 2, grid),
                              sum_pdf(m, grid), h1, h2, hs))

    # the displayed inverse at the fitted parameters
    g_, a_, b_ = fit.gamma_hat, fit.alpha_hat, fit.beta_hat
    mf = gk_model(make_pareto_II(g_), a_, b_)
    sv = np.linspace(0.1, 5.0, 50)
    worst = 0.0
    for q in (0.05, 0.25, 0.5, 0.75, 0.95):
        disp = (-1 - b_ * sv + (q * (1 + a_ * sv) ** (-g_ - 1)
                                + (1 - q) * (1 + b_ * sv) ** (-g_ - 1)) ** (-1 / (g_ + 1))) / (a_ - b_)
        worst = max(worst, float(np.max(np.abs(cond_quantile_x1_given_s(mf, q, sv) - disp))))
    checks.append(close("ex1 X1|S quantile vs displayed inverse", worst, 0.0, 1e-10))

    pairs = sample_pairs(m, FIGURE_SAMPLE_SIZE, EXAMPLE_SPECS[1]["seed"])
    write_csv(out / "fig2_sample.csv", ["x1", "s"], columns_to_rows(pairs.x1, pairs.s))
    est = fit_clayton_pareto(pairs)
    me = gk_model(make_pareto_II(est.gamma_hat), est.alpha_hat, est.beta_hat)
    sgrid = np.linspace(max(pairs.s.min(), 1e-3), pairs.s.max(), 200)
    exact = _band_columns(m, "x1_given_s", sgrid)
    fitted = _band_columns(me, "x1_given_s", sgrid)
    linear = _linear_columns(pairs.s, pairs.x1, sgrid)
    header = (["s"] + BAND_HEADER + ["est_" + h for h in BAND_HEADER]
              + ["lin_" + h for h in BAND_HEADER])
    write_csv(out / "fig2_bands.csv", header,
              columns_to_rows(sgrid, *exact, *fitted, *linear))
    _, slope = linear_quantile_fit(pairs.s, pairs.x1, 0.5)
    checks.append(Check("ex1 linear median slope in sanity range", slope, 0.25, 0.2,
                        bool(0.05 < slope < 0.45), "interval (0.05, 0.45)"))
    return checks


def example_2(out: Path) -> list:
    m = example_model(2)
    G = m.generator
    checks = [
        close("ex2 constant c", TRUNC_NORMAL_C, 6.302974, 1e-6),
        close("ex2 Gbar(0)", G.survival(0.0), 1.0, 1e-12),
        close("ex2 ginv(g(0.7))", G.density_inverse(G.density(0.7)), 0.7, 1e-8),
    ]
    pairs = sample_pairs(m, FIGURE_SAMPLE_SIZE, EXAMPLE_SPECS[2]["seed"])
    write_csv(out / "fig3_sample.csv", ["x1", "s"], columns_to_rows(pairs.x1, pairs.s))
    grid = np.linspace(0.0, max(float(pairs.x1.max()), 0.5), 200)
    cols = _band_columns(m, "s_given_x1", grid)
    bottom50 = confidence_band(m, "s_given_x1", 0.5, BOTTOM, grid)
    bottom90 = confidence_band(m, "s_given_x1", 0.9, BOTTOM, grid)
    linear = _linear_columns(pairs.x1, pairs.s, grid)
    write_csv(out / "fig3_bands.csv",
              ["x1"] + BAND_HEADER + ["bottom50_upper", "bottom90_upper"]
              + ["lin_" + h for h in BAND_HEADER],
              columns_to_rows(grid, *cols, bottom50.upper.grid[1], bottom90.upper.grid[1],
                              *linear))
    checks.append(holds("ex2 median regression above x", np.all(cols[0] >= grid)))
    checks.append(close("ex2 bottom 50% upper equals median",
                        np.max(np.abs(bottom50.upper.grid[1] - cols[0])), 0.0, 0.0))
    inside = empirical_coverage(m, bottom50, FIGURE_SAMPLE_SIZE, 0, pairs=pairs)
    checks.append(close("ex2 sample points in bottom 50% band", inside * 100, 54, 10,
                        "sample dependent plausibility check"))
    big = empirical_coverage(m, confidence_band(m, "s_given_x1", 0.9, CENTERED, grid),
                             20000, EXAMPLE_SPECS[2]["seed"])
    checks.append(close("ex2 centered 90% coverage (n=20000)", big, 0.9, 0.0064))
    return checks


def example_3(out: Path) -> list:
    m = example_model(3)
    a, b = 2.0, 1.0
    s = np.linspace(0.0, 20.0, 401)
    disp = (a / (a - b) * np.exp(-b * s) - b / (a - b) * np.exp(-a * s)
            + a * b * s / (2 * (a - b)) * (np.exp(-b * s) - np.exp(-a * s)))
    checks = [close("ex3 survival of S vs displayed form",
                    np.max(np.abs(sum_survival(m, s) - disp)), 0.0, 1e-12)]
    x = 0.7
    sv = np.linspace(x, 6, 60)
    disp_cond = (1 + (a - b) * x + b * sv) / (1 + a * x) * np.exp(-b * (sv - x))
    checks.append(close("ex3 survival of S|X1 vs displayed form",
                        np.max(np.abs(cond_survival_s_given_x1(m, sv, x) - disp_cond)), 0.0, 1e-12))
    s0 = 1.5
    xv = np.linspace(0, s0, 40)
    disp_x = ((1 + a * s0 - (1 + (a - b) * xv + b * s0) * np.exp((a - b) * (s0 - xv)))
              / (1 + a * s0 - (1 + b * s0) * np.exp((a - b) * s0)))
    checks.append(close("ex3 survival of X1|S vs displayed form",
                        np.max(np.abs(1 - cond_df_x1_given_s(m, xv, s0) - disp_x)), 0.0, 1e-12))
    checks.append(close("ex3 hazard of S at s=30", sum_hazard(m, 30.0), 1.0, 0.05,
                        "limit equals hazard limit of X2"))
    grid = np.linspace(0.0, 8.0, 200)
    hs = sum_hazard(m, grid)
    h1 = marginal_hazard(m, 1, grid)
    h2 = marginal_hazard(m, 2, grid)
    checks.append(holds("ex3 hazards of X1, X2, S increasing",
                        all(np.all(np.diff(h) >= -1e-12) for h in (h1, h2, hs))))
    write_csv(out / "fig4_density.csv",
              ["s", "pdf_x1", "pdf_x2", "pdf_s", "hazard_x1", "hazard_x2", "hazard_s"],
              columns_to_rows(grid, marginal_pdf(m, 1, grid), marginal_pdf(m, 2, grid),
                              sum_pdf(m, grid), h1, h2, hs))
    return checks


EX4_MOMENTS = {"mean1": 0.198782, "mean2": 0.596347, "var1": 0.019589,
               "var2": 0.176301, "cov12": -0.029889, "cov1S": -0.010299}


def example_4(out: Path) -> list:
    m = example_model(4)
    table = moment_table(m)
    checks = [close(f"ex4 {k}", table[k], v, 2e-4) for k, v in EX4_MOMENTS.items()]
    checks.append(close("ex4 cov1S identity", table["cov1S"], table["cov1S_identity"], 1e-9))

    s0 = 0.9
    xv = np.linspace(0, s0, 30)
    disp = ((np.exp(2 * xv + s0 + 1 - np.exp(2 * xv + s0)) - np.exp(s0 + 1 - np.exp(s0)))
            / (np.exp(3 * s0 + 1 - np.exp(3 * s0)) - np.exp(s0 + 1 - np.exp(s0))))
    checks.append(close("ex4 X1|S distribution vs displayed form",
                        np.max(np.abs(cond_df_x1_given_s(m, xv, s0) - disp)), 0.0, 1e-12))

    sgrid = np.linspace(0.01, 2.0, 200)
    levels = {q: quantile_curve(m, "x1_given_s", q, sgrid).grid[1]
              for q in (0.05, 0.25, 0.5, 0.75, 0.95)}
    write_csv(out / "fig5_levels.csv", ["s", "q05", "q25", "q50", "q75", "q95"],
              columns_to_rows(sgrid, *levels.values()))
    med = levels[0.5]
    peak = int(np.argmax(med))
    checks.append(holds("ex4 median regression rises then falls",
                        0 < peak < med.size - 1 and med[0] < med[peak] > med[-1],
                        f"peak at s={sgrid[peak]:.3f}"))
    s_values = [0.2, 0.4, 0.6, 0.8, 1.0, 2.0]
    xgrid = np.linspace(0.0, 2.0, 401)
    probe = stochastic_monotonicity_probe(m, "x1_given_s", s_values, xgrid)
    checks.append(holds("ex4 conditional DFs cross between s=0.6 and s=2",
                        (0.6, 2.0) in probe.crossing_pairs()))
    cols = [np.where(xgrid >= sv, 1.0, cond_df_x1_given_s(m, np.minimum(xgrid, sv), sv))
            for sv in s_values]
    write_csv(out / "fig5_cond_df.csv", ["x"] + [f"df_s{sv:g}" for sv in s_values],
              columns_to_rows(xgrid, *cols))
    return checks


EXAMPLES = {1: example_1, 2: example_2, 3: example_3, 4: example_4}


def reproduce(n: int, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return EXAMPLES[n](out)
