"""Sums of dependent lifetimes under time-transformed exponential (TTE) models.

The joint survival is ``Fbar(x1, x2) = Gbar(R1(x1) + R2(x2))``. The package
computes the law of ``S = X1 + X2``, conditional quantiles of ``S | X1`` and
``X1 | S`` with confidence bands, and simulation and estimation utilities.
"""

from .conditional import (
    BOTTOM, CENTERED, S_GIVEN_X1, X1_GIVEN_S, ConditionalLaw, ConfidenceBand,
    OrderingReport, QuantileCurve, band_levels, cond_df_s_given_x1,
    cond_df_x1_given_s, cond_quantile_s_given_x1, cond_quantile_x1_given_s,
    cond_survival_quantile_s_given_x1, cond_survival_s_given_x1, conditional_law,
    confidence_band, export_grid, median_regression, quantile_curve,
    stochastic_monotonicity_probe,
)
from .convolution import (
    SumLaw, copula_convolution_oracle, hazard_of_sum, joint_pdf_x1_s, sum_cdf,
    sum_hazard, sum_law, sum_pdf, sum_survival,
)
from .errors import (
    ConditioningError, DomainError, EstimationError, NumericalError,
    QuadratureError, RootFindError, TTEError,
)
from .estimators import (
    ClaytonParetoRegressor, ConditionalQuantileRegressor, LinearQuantileRegressor,
)
from .generators import (
    CATALOG, GeneratorSpec, ValidationReport, custom_generator, make_exponential,
    make_gumbel_barnett, make_pareto_II, make_translated_erlang,
    make_truncated_normal, validate_generator,
)
from .inference import (
    FitResult, SamplePairs, clayton_pareto_moments, empirical_coverage,
    fit_clayton_pareto, kendall_tau, ks_distance, linear_quantile_fit,
    moment_table, numeric_moments, pinball_loss, sample_pairs, uniform_pairs,
)
from .model import (
    BaselineMarginal, GKParams, TTEModel, distortion, exponential_baseline,
    generator_baseline, gk_as_tte, gk_model, joint_pdf, joint_survival,
    marginal_hazard, marginal_pdf, marginal_survival, survival_copula,
)
from .specfile import ModelSpec, SpecError, load_model_spec, parse_model_spec

__version__ = "0.1.0"
