"""scikit-learn compatible estimators wrapping the prediction machinery.

All estimators take a single feature column ``X[:, 0]``: the conditioning
value (``X1`` when predicting ``S``, ``S`` when predicting ``X1``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .conditional import (
    CENTERED, S_GIVEN_X1, band_levels, conditional_law, normalize_direction,
)
from .errors import DomainError
from .generators import make_pareto_II
from .inference import SamplePairs, fit_clayton_pareto, linear_quantile_fit
from .model import gk_model


def _single_column(X):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single conditioning column, got {X.shape[1]}")
    return X[:, 0]


class ConditionalQuantileRegressor(RegressorMixin, BaseEstimator):
    """Predicts a conditional quantile under a fixed, fully specified model.

    ``fit`` only validates its input; the model is not estimated.

    Parameters
    ----------
    model : TTEModel
    direction : {"s_given_x1", "x1_given_s"}
    quantile : float
        Distribution-function level of the prediction (0.5 for the median).
    """

    def __init__(self, model=None, direction="s_given_x1", quantile=0.5):
        self.model = model
        self.direction = direction
        self.quantile = quantile

    def _resolve_model(self, X, y):
        if self.model is None:
            raise ValueError("a TTEModel must be supplied")
        return self.model

    def fit(self, X, y=None):
        if y is None:
            x = _single_column(X)
        else:
            X, y = check_X_y(X, y, dtype=float)
            x = X[:, 0]
        if not 0 < self.quantile < 1:
            raise ValueError("quantile must lie in (0, 1)")
        self.direction_ = normalize_direction(self.direction)
        self.model_ = self._resolve_model(x, y)
        self.law_ = conditional_law(self.model_, self.direction_)
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "law_")
        return np.asarray(self.law_.quantile(self.quantile, _single_column(X)), dtype=float)

    def predict_interval(self, X, p=0.9, kind=CENTERED):
        """Lower and upper band limits, shape ``(n_samples, 2)``."""
        check_is_fitted(self, "law_")
        c = _single_column(X)
        lo_level, hi_level = band_levels(p, kind)
        if lo_level is None:
            if self.direction_ != S_GIVEN_X1:
                raise DomainError("bottom bands are defined for S | X1 only")
            lower = c.copy()
        else:
            lower = np.asarray(self.law_.quantile(lo_level, c), dtype=float)
        upper = np.asarray(self.law_.quantile(hi_level, c), dtype=float)
        return np.column_stack([lower, upper])


class ClaytonParetoRegressor(ConditionalQuantileRegressor):
    """Pareto II GK model fitted by Kendall's tau and sample means.

    With ``direction="s_given_x1"`` the feature is ``X1`` and the target is
    ``S``; with ``"x1_given_s"`` the roles swap. ``X2`` is recovered as the
    difference in both cases.
    """

    def __init__(self, direction="s_given_x1", quantile=0.5):
        super().__init__(model=None, direction=direction, quantile=quantile)

    def _resolve_model(self, x, y):
        if y is None:
            raise ValueError("ClaytonParetoRegressor.fit needs targets")
        if normalize_direction(self.direction) == S_GIVEN_X1:
            x1, s = x, y
        else:
            x1, s = y, x
        if np.any(s < x1) or np.any(x1 < 0):
            raise ValueError("need 0 <= X1 <= S for every observation")
        x2 = s - x1
        self.fit_result_ = fit_clayton_pareto(SamplePairs(0, x1.size, x1, x2, s))
        self.tau_ = self.fit_result_.tau_hat
        self.gamma_ = self.fit_result_.gamma_hat
        self.alpha_ = self.fit_result_.alpha_hat
        self.beta_ = self.fit_result_.beta_hat
        return gk_model(make_pareto_II(self.gamma_), self.alpha_, self.beta_)


class LinearQuantileRegressor(RegressorMixin, BaseEstimator):
    """Linear quantile regression by exact pinball-loss minimization.

    Enumerates every line through two observations, so cost grows as
    ``n^3``; intended for samples of a few hundred points.
    """

    def __init__(self, quantile=0.5):
        self.quantile = quantile

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        if X.shape[1] != 1:
            raise ValueError("LinearQuantileRegressor supports a single feature")
        intercept, slope = linear_quantile_fit(X[:, 0], y, self.quantile)
        self.intercept_ = intercept
        self.coef_ = np.array([slope])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return self.intercept_ + self.coef_[0] * _single_column(X)
