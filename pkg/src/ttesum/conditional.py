"""Conditional laws of ``S | X1`` and ``X1 | S``, quantile curves and bands.

Quantile levels in this module are distribution-function levels: ``q`` is
``P(target <= value | conditioning)``. The ``S | X1`` formulas are most
naturally written with survival levels, ``Fbar^{-1}(v | x)``;
:func:`cond_survival_quantile_s_given_x1` keeps that form and
:func:`cond_quantile_s_given_x1` converts with ``v = 1 - q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ._numerics import DEFAULT_QUAD, QuadratureCfg, integrate, monotone_root
from .convolution import joint_pdf_x1_s, sum_law
from .errors import ConditioningError, DomainError, RootFindError
from .model import TTEModel, marginal_survival_inverse

S_GIVEN_X1 = "S_given_X1"
X1_GIVEN_S = "X1_given_S"
DIRECTIONS = (S_GIVEN_X1, X1_GIVEN_S)
ANALYTIC = "analytic"
ROOT_FIND = "root_find"


def _out(val, *likes):
    return float(val) if all(np.ndim(v) == 0 for v in likes) else val


def _check_levels(q):
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise DomainError("quantile level must lie in (0, 1)")
    return q


def normalize_direction(direction: str) -> str:
    key = direction.lower().replace("-", "_")
    if key in ("s_given_x1", "s|x1"):
        return S_GIVEN_X1
    if key in ("x1_given_s", "x1|s"):
        return X1_GIVEN_S
    raise DomainError(f"unknown direction {direction!r}")


# S | X1 ------------------------------------------------------------------

def _x1_denominator(m, x):
    r1 = m.baseline1.cumhazard(x)
    den = np.asarray(m.generator.density(r1), dtype=float)
    if np.any(~(den > 0)):
        raise ConditioningError(
            "density of X1 vanishes at the conditioning value; S | X1 undefined there")
    return r1, den


def cond_survival_s_given_x1(m: TTEModel, s, x):
    """``P(S > s | X1 = x) = g(R1(x) + R2(s - x)) / g(R1(x))``; 1 for ``s < x``."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    r1, den = _x1_denominator(m, x)
    gap = np.maximum(s - x, 0.0)
    num = m.generator.density(r1 + m.baseline2.cumhazard(gap))
    out = np.where(s <= x, 1.0, num / den)
    return _out(out, s, x)


def cond_df_s_given_x1(m: TTEModel, s, x):
    out = 1.0 - np.asarray(cond_survival_s_given_x1(m, s, x))
    return _out(out, s, x)


def _s_given_x1_method(m):
    return ANALYTIC if m.generator.density_inverse is not None else ROOT_FIND


def cond_survival_quantile_s_given_x1(m: TTEModel, v, x):
    """Inverse of ``s -> P(S > s | X1 = x)`` at survival level ``v``.

    With a closed-form density inverse this is
    ``x + R2^{-1}(ginv(v g(R1(x))) - R1(x))``, which for GK models reduces
    to ``(b - a)/b x + ginv(v g(a x)) / b``. Otherwise the conditional
    survival is inverted by bracketed root search on ``[x, x + T]``.
    """
    v = _check_levels(v)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("conditioning value must be nonnegative")
    G = m.generator
    r1, den = _x1_denominator(m, x)
    if G.density_inverse is not None:
        t = G.density_inverse(v * den)
        out = x + m.baseline2.cumhazard_inverse(np.maximum(t - r1, 0.0))
    else:
        vv, xx = np.broadcast_arrays(v, x)
        out = monotone_root(lambda s: cond_survival_s_given_x1(m, s, xx), vv,
                            xx, xx + m.cutoff(2), increasing=False)
    return _out(out, v, x)


def cond_quantile_s_given_x1(m: TTEModel, q, x):
    """DF-level quantile of ``S | X1 = x``."""
    q = _check_levels(q)
    out = cond_survival_quantile_s_given_x1(m, 1.0 - q, x)
    return _out(out, q, x)


# X1 | S ------------------------------------------------------------------

def _x1_given_s_method(m):
    if m.gk is None:
        return ROOT_FIND
    if m.gk.equal_rates or m.generator.density_inverse is not None:
        return ANALYTIC
    return ROOT_FIND


def _general_df_x1_given_s(m, x, s, quad):
    if not s > 0:
        raise ConditioningError("X1 | S = s needs s > 0")

    def integrand(t):
        return joint_pdf_x1_s(m, t, s)

    total = integrate(integrand, 0.0, s, quad, points=(0.5 * s,))
    if not total > 0:
        raise ConditioningError(f"density of S vanishes at s={s:g}")
    if x <= 0:
        return 0.0
    if x >= s:
        return 1.0
    part = integrate(integrand, 0.0, x, quad, points=(0.5 * x,))
    return min(max(part / total, 0.0), 1.0)


def cond_df_x1_given_s(m: TTEModel, x, s, quad: Optional[QuadratureCfg] = None):
    """``P(X1 <= x | S = s)`` for ``0 <= x <= s``.

    GK models: ``[g((a-b)x + b s) - g(b s)] / [g(a s) - g(b s)]`` for
    distinct rates, ``x / s`` for equal rates. General TTE models integrate
    the joint density of ``(X1, S)`` and normalize by the density of ``S``.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ConditioningError("X1 | S = s needs s > 0")
    xc = np.clip(x, 0.0, s)
    if m.gk is None:
        xb, sb = np.broadcast_arrays(xc, s)
        out = np.array([_general_df_x1_given_s(m, a, b, quad or DEFAULT_QUAD)
                        for a, b in zip(xb.ravel(), sb.ravel())]).reshape(xb.shape)
        return _out(out, x, s)
    a, b = m.gk.alpha, m.gk.beta
    if m.gk.equal_rates:
        out = xc / s
    else:
        g = m.generator.density
        g_bs = g(b * s)
        den = g(a * s) - g_bs
        if np.any(den == 0):
            raise ConditioningError("density of S vanishes at the conditioning value")
        out = (g((a - b) * xc + b * s) - g_bs) / den
    return _out(out, x, s)


def cond_quantile_x1_given_s(m: TTEModel, q, s, quad: Optional[QuadratureCfg] = None):
    """DF-level quantile of ``X1 | S = s``.

    Equal GK rates give ``q s``; distinct rates with a closed-form density
    inverse give ``b s/(b - a) + ginv(q g(a s) + (1 - q) g(b s)) / (a - b)``.
    All other cases invert the conditional DF by root search on ``[0, s]``.
    """
    q = _check_levels(q)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ConditioningError("X1 | S = s needs s > 0")
    qb, sb = np.broadcast_arrays(q, s)
    if m.gk is not None:
        a, b = m.gk.alpha, m.gk.beta
        if m.gk.equal_rates:
            return _out(qb * sb, q, s)
        G = m.generator
        if G.density_inverse is not None:
            arg = qb * G.density(a * sb) + (1.0 - qb) * G.density(b * sb)
            out = b * sb / (b - a) + G.density_inverse(arg) / (a - b)
            return _out(np.clip(out, 0.0, sb), q, s)
        out = monotone_root(lambda x: cond_df_x1_given_s(m, x, sb), qb,
                            np.zeros_like(sb), sb, expand=False)
        return _out(out, q, s)
    quad = quad or DEFAULT_QUAD
    flat = []
    for level, sv in zip(qb.ravel(), sb.ravel()):
        try:
            flat.append(brentq(lambda x: _general_df_x1_given_s(m, x, sv, quad) - level,
                               0.0, sv, xtol=1e-13, rtol=1e-15, maxiter=200))
        except ValueError as exc:
            raise RootFindError(f"no sign change on [0, {sv:g}] for level {level:g}",
                                bracket=(0.0, sv)) from exc
    return _out(np.array(flat).reshape(qb.shape), q, s)


# Laws, curves, bands -----------------------------------------------------

@dataclass(frozen=True)
class ConditionalLaw:
    model: TTEModel
    direction: str
    method_tag: str

    def df(self, target, conditioning):
        if self.direction == S_GIVEN_X1:
            return cond_df_s_given_x1(self.model, target, conditioning)
        return cond_df_x1_given_s(self.model, target, conditioning)

    def quantile(self, q, conditioning):
        if self.direction == S_GIVEN_X1:
            return cond_quantile_s_given_x1(self.model, q, conditioning)
        return cond_quantile_x1_given_s(self.model, q, conditioning)


def conditional_law(m: TTEModel, direction: str) -> ConditionalLaw:
    direction = normalize_direction(direction)
    tag = _s_given_x1_method(m) if direction == S_GIVEN_X1 else _x1_given_s_method(m)
    return ConditionalLaw(m, direction, tag)


def export_grid(m: TTEModel, direction: str, size: int = 200) -> np.ndarray:
    """Equally spaced conditioning values between the 1% and 99% quantiles."""
    direction = normalize_direction(direction)
    if direction == S_GIVEN_X1:
        lo, hi = marginal_survival_inverse(m, 1, np.array([0.99, 0.01]))
    else:
        lo, hi = sum_law(m).quantile(np.array([0.01, 0.99]))
    return np.linspace(lo, hi, size)


@dataclass
class QuantileCurve:
    direction: str
    q: float
    evaluator: Callable
    grid: Optional[tuple] = None

    def __call__(self, c):
        return self.evaluator(c)

    def sample(self, conditioning) -> tuple:
        c = np.asarray(conditioning, dtype=float)
        self.grid = (c, np.asarray(self.evaluator(c), dtype=float))
        return self.grid


def quantile_curve(m: TTEModel, direction: str, q: float,
                   grid: Optional[Sequence[float]] = None) -> QuantileCurve:
    law = conditional_law(m, direction)
    curve = QuantileCurve(law.direction, float(q), lambda c: law.quantile(q, c))
    curve.sample(export_grid(m, law.direction) if grid is None else grid)
    return curve


def median_regression(m: TTEModel, direction: str,
                      grid: Optional[Sequence[float]] = None) -> QuantileCurve:
    """Conditional median as a function of the conditioning value."""
    return quantile_curve(m, direction, 0.5, grid)


CENTERED = "centered"
BOTTOM = "bottom"


@dataclass
class ConfidenceBand:
    p: float
    kind: str
    lower: QuantileCurve
    upper: QuantileCurve


def band_levels(p: float, kind: str = CENTERED) -> tuple:
    """DF levels of the lower and upper curves (``None`` marks the identity)."""
    if not 0 < p < 1:
        raise DomainError("coverage p must lie in (0, 1)")
    if kind == CENTERED:
        return (1.0 - p) / 2.0, (1.0 + p) / 2.0
    if kind == BOTTOM:
        return None, p
    raise DomainError(f"unknown band kind {kind!r}")


def confidence_band(m: TTEModel, direction: str, p: float, kind: str = CENTERED,
                    grid: Optional[Sequence[float]] = None) -> ConfidenceBand:
    """Centered band between DF levels ``(1-p)/2`` and ``(1+p)/2``, or bottom band.

    The bottom band exists for ``S | X1`` only: it runs from the
    conditioning value ``x`` (as ``S >= X1``) up to the DF-level ``p``
    quantile, i.e. survival level ``1 - p``.
    """
    law = conditional_law(m, direction)
    lo_level, hi_level = band_levels(p, kind)
    if grid is None:
        grid = export_grid(m, law.direction)
    if kind == BOTTOM:
        if law.direction != S_GIVEN_X1:
            raise DomainError("bottom bands are defined for S | X1 only")
        lower = QuantileCurve(law.direction, 0.0, lambda c: np.asarray(c, dtype=float) + 0.0)
        lower.sample(grid)
    else:
        lower = quantile_curve(m, law.direction, lo_level, grid)
    upper = quantile_curve(m, law.direction, hi_level, grid)
    return ConfidenceBand(float(p), kind, lower, upper)


@dataclass
class OrderingReport:
    direction: str
    conditioning: list
    pairs: list = field(default_factory=list)

    @property
    def stochastically_increasing(self) -> bool:
        return all(p["ordered"] for p in self.pairs)

    def crossing_pairs(self) -> list:
        return [(p["c1"], p["c2"]) for p in self.pairs if not p["ordered"]]


def stochastic_monotonicity_probe(m: TTEModel, direction: str,
                                  conditioning: Sequence[float],
                                  grid: Sequence[float], tol: float = 1e-12) -> OrderingReport:
    """Compare conditional DFs pairwise on ``grid``.

    For conditioning values ``c < c'`` the pair is ordered when
    ``df(t | c) >= df(t | c')`` at every grid point ``t`` (the target is
    stochastically larger under ``c'``). Otherwise the report lists the
    grid points where the order flips.
    """
    law = conditional_law(m, direction)
    cs = sorted(float(c) for c in conditioning)
    t = np.asarray(grid, dtype=float)

    def df_at(c):
        if law.direction == X1_GIVEN_S:
            return np.where(t >= c, 1.0, law.df(np.minimum(t, c), c))
        return np.where(t <= c, 0.0, law.df(np.maximum(t, c), c))

    curves = {c: np.asarray(df_at(c), dtype=float) for c in cs}
    report = OrderingReport(law.direction, cs)
    for i, c1 in enumerate(cs):
        for c2 in cs[i + 1:]:
            diff = curves[c1] - curves[c2]
            bad = diff < -tol
            report.pairs.append({
                "c1": c1, "c2": c2, "ordered": not bool(bad.any()),
                "crossings": t[bad].tolist(),
            })
    return report
