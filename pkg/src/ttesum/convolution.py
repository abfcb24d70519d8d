"""Law of the sum ``S = X1 + X2`` under a TTE model.

Two routes are provided. The distortion route integrates the joint density
of ``(X1, S)`` (closed forms for GK models, adaptive quadrature otherwise).
The copula route integrates ``f1(x) * d1C(F1bar(x), F2bar(s - x))`` through
the Archimedean survival copula and serves as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._numerics import DEFAULT_QUAD, QuadratureCfg, integrate
from .errors import DomainError
from .generators import GeneratorSpec
from .model import GKParams, TTEModel, marginal_pdf, marginal_survival

CLOSED_GK_DISTINCT = "closed_gk_distinct"
CLOSED_GK_EQUAL = "closed_gk_equal"
QUADRATURE = "quadrature"
HAZARD_FLOOR = 1e-14


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


def _loop(fn, s):
    arr = np.asarray(s, dtype=float)
    out = np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return _scalar_or_array(out, s)


def method_for(m: TTEModel, method: Optional[str] = None) -> str:
    if method is not None:
        if method not in (QUADRATURE, CLOSED_GK_DISTINCT, CLOSED_GK_EQUAL):
            raise DomainError(f"unknown method {method!r}")
        if method != QUADRATURE and m.gk is None:
            raise DomainError("closed forms need a GK model")
        return method if method == QUADRATURE else method_for(m)
    if m.gk is None:
        return QUADRATURE
    return CLOSED_GK_EQUAL if m.gk.equal_rates else CLOSED_GK_DISTINCT


def joint_pdf_x1_s(m: TTEModel, x, s):
    """Density of ``(X1, S)``; zero outside the wedge ``0 <= x <= s``."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    inside = (x >= 0) & (x <= s)
    xx = np.where(inside, x, 0.0)
    yy = np.where(inside, s - x, 0.0)
    t = m.baseline1.cumhazard(xx) + m.baseline2.cumhazard(yy)
    val = m.baseline1.hazard(xx) * m.baseline2.hazard(yy) * -m.generator.density_derivative(t)
    return _scalar_or_array(np.where(inside, val, 0.0), x + s)


def joint_df_gk(G: GeneratorSpec, p: GKParams, x, s):
    """Distribution function ``P(X1 <= x, S <= s)`` of a GK model, ``x <= s``."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any((x < 0) | (x > s)):
        raise DomainError("joint_df_gk needs 0 <= x <= s")
    a, b = p.alpha, p.beta
    if p.equal_rates:
        out = 1.0 - G.survival(a * x) - a * x * G.density(a * s)
    else:
        k = a / (a - b)
        out = (1.0 - G.survival(a * x) + k * G.survival((a - b) * x + b * s)
               - k * G.survival(b * s))
    return _scalar_or_array(out, x + s)


def joint_survival_x1_s(m: TTEModel, x: float, s: float,
                        quad: Optional[QuadratureCfg] = None) -> float:
    """``P(X1 > x, S > s)`` for ``0 <= x <= s`` by quadrature."""
    x = float(x)
    s = float(s)
    if not 0 <= x <= s:
        raise DomainError("joint_survival_x1_s needs 0 <= x <= s")
    G, b1, b2 = m.generator, m.baseline1, m.baseline2

    def integrand(y):
        return b1.hazard(y) * G.density(b1.cumhazard(y) + b2.cumhazard(s - y))

    head = float(G.survival(b1.cumhazard(s)))
    return head + integrate(integrand, x, s, quad or DEFAULT_QUAD, points=(0.5 * (x + s),))


def _survival_quadrature(m, s, quad):
    return joint_survival_x1_s(m, 0.0, s, quad)


def _pdf_quadrature(m, s, quad):
    if s <= 0:
        return 0.0
    return integrate(lambda x: joint_pdf_x1_s(m, x, s), 0.0, s, quad or DEFAULT_QUAD,
                     points=(0.5 * s,))


def sum_survival(m: TTEModel, s, *, method: Optional[str] = None,
                 quad: Optional[QuadratureCfg] = None):
    """Survival function of ``S``; closed form for GK models, else quadrature."""
    method = method_for(m, method)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("s must be nonnegative")
    if method == QUADRATURE:
        return _loop(lambda v: _survival_quadrature(m, v, quad), s)
    G, a, b = m.generator, m.gk.alpha, m.gk.beta
    if method == CLOSED_GK_EQUAL:
        out = G.survival(a * s_arr) + a * s_arr * G.density(a * s_arr)
    else:
        out = (a * G.survival(b * s_arr) - b * G.survival(a * s_arr)) / (a - b)
    return _scalar_or_array(out, s)


def sum_cdf(m: TTEModel, s, **kw):
    return _scalar_or_array(1.0 - np.asarray(sum_survival(m, s, **kw)), s)


def sum_pdf(m: TTEModel, s, *, method: Optional[str] = None,
            quad: Optional[QuadratureCfg] = None):
    """Density of ``S``.

    GK closed forms: ``ab/(b-a) [g(as) - g(bs)]`` for distinct rates and
    ``-a^2 s g'(as)`` for equal rates. Otherwise the joint density of
    ``(X1, S)`` is integrated over ``x in [0, s]``.
    """
    method = method_for(m, method)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("s must be nonnegative")
    if method == QUADRATURE:
        return _loop(lambda v: _pdf_quadrature(m, v, quad), s)
    G, a, b = m.generator, m.gk.alpha, m.gk.beta
    if method == CLOSED_GK_EQUAL:
        out = -a * a * s_arr * G.density_derivative(a * s_arr)
    else:
        out = a * b / (b - a) * (G.density(a * s_arr) - G.density(b * s_arr))
    return _scalar_or_array(out, s)


def sum_hazard(m: TTEModel, s, **kw):
    """Hazard rate ``f_S / Fbar_S``; refuses points where the survival vanishes."""
    surv = np.asarray(sum_survival(m, s, **kw), dtype=float)
    if np.any(surv < HAZARD_FLOOR):
        raise DomainError(
            f"survival of S below {HAZARD_FLOOR:g}; hazard is not resolvable there")
    out = np.asarray(sum_pdf(m, s, **kw), dtype=float) / surv
    return _scalar_or_array(out, s)


hazard_of_sum = sum_hazard


def copula_convolution_oracle(m: TTEModel, s: float,
                              quad: Optional[QuadratureCfg] = None) -> float:
    """Survival of ``S`` through the survival copula (C-convolution).

    ``Fbar_S(s) = F1bar(s) + int_0^s f1(x) d1C(F1bar(x), F2bar(s - x)) dx``
    with ``d1C(u, v) = g(Ginv(u) + Ginv(v)) / g(Ginv(u))``. Marginals enter
    only through their survival values, which are mapped back with the
    generator inverse (numeric when no closed form exists).
    """
    s = float(s)
    if s < 0:
        raise DomainError("s must be nonnegative")
    G = m.generator

    def d1_copula(u, v):
        a = G.survival_inverse(u)
        return G.density(a + G.survival_inverse(v)) / G.density(a)

    def integrand(x):
        u = marginal_survival(m, 1, x)
        v = marginal_survival(m, 2, s - x)
        f1 = marginal_pdf(m, 1, x)
        live = (u > 0) & (f1 > 0)
        # beyond the representable tail X1 carries no mass
        return np.where(live, f1 * d1_copula(np.where(live, u, 1.0), v), 0.0)

    head = float(marginal_survival(m, 1, s))
    return head + integrate(integrand, 0.0, s, quad or DEFAULT_QUAD, points=(0.5 * s,))


@dataclass(frozen=True)
class SumLaw:
    """Distribution of ``S`` bound to a model and an evaluation route."""

    model: TTEModel
    method_tag: str
    quad: QuadratureCfg = field(default=DEFAULT_QUAD)

    def survival(self, s):
        return sum_survival(self.model, s, method=self.method_tag, quad=self.quad)

    def cdf(self, s):
        return _scalar_or_array(1.0 - np.asarray(self.survival(s)), s)

    def pdf(self, s):
        return sum_pdf(self.model, s, method=self.method_tag, quad=self.quad)

    def hazard(self, s):
        return sum_hazard(self.model, s, method=self.method_tag, quad=self.quad)

    def quantile(self, q):
        """DF-level quantile of ``S`` by root search on the survival."""
        from ._numerics import monotone_root

        q = np.asarray(q, dtype=float)
        if np.any((q <= 0) | (q >= 1)):
            raise DomainError("quantile level must lie in (0, 1)")
        start = max(self.model.cutoff(1), self.model.cutoff(2), 1e-3)
        out = monotone_root(lambda t: np.asarray(self.survival(t)), 1.0 - q,
                            np.zeros_like(q), np.full_like(q, start), increasing=False)
        return _scalar_or_array(out, q)


def sum_law(m: TTEModel, method: Optional[str] = None,
            quad: Optional[QuadratureCfg] = None) -> SumLaw:
    return SumLaw(m, method_for(m, method), quad or DEFAULT_QUAD)
