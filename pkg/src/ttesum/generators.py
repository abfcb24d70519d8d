"""Generators of TTE models and the catalog of concrete families.

A generator is a one-dimensional survival function ``Gbar`` on ``[0, inf)``
with ``Gbar(0) = 1``, strictly decreasing and convex, together with its
density ``g = -Gbar'``, the derivative ``g'`` and the inverses used by the
quantile formulas. All callables are vectorized over numpy arrays and
return a plain float for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy import special

from ._numerics import monotone_root
from .errors import DomainError

TAIL_EPS = 1e-12
TOL_CONVEX = 1e-9


def _vectorize(fn):
    def wrapped(t):
        arr = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            out = fn(arr)
        return float(out) if arr.ndim == 0 else out

    wrapped.__name__ = getattr(fn, "__name__", "generator_fn")
    wrapped.__doc__ = fn.__doc__
    return wrapped


@dataclass(frozen=True)
class GeneratorSpec:
    """Survival generator of a TTE model plus derivatives and inverses.

    ``density_inverse`` is ``None`` when ``g`` has no usable closed-form
    inverse; quantile routines then fall back to root finding.
    """

    name: str
    survival: Callable
    density: Callable
    density_derivative: Callable
    survival_inverse: Callable
    log_survival: Callable
    density_inverse: Optional[Callable] = None
    support_hint: float = math.inf
    params: Mapping[str, float] = field(default_factory=dict)
    analytic_survival_inverse: bool = True

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"GeneratorSpec({self.name}{', ' if args else ''}{args})"

    @property
    def density_at_zero(self) -> float:
        return float(self.density(0.0))


def default_support_hint(survival: Callable, eps: float = TAIL_EPS) -> float:
    """Smallest power of two ``T`` with ``survival(T) < eps``."""
    for k in range(-20, 1100):
        t = math.ldexp(1.0, k)
        if survival(t) < eps:
            return t
    raise DomainError("generator survival does not reach the tail threshold")


def custom_generator(
    name: str,
    survival: Callable,
    density: Callable,
    density_derivative: Optional[Callable] = None,
    survival_inverse: Optional[Callable] = None,
    density_inverse: Optional[Callable] = None,
    log_survival: Optional[Callable] = None,
    support_hint: Optional[float] = None,
    params: Optional[Mapping[str, float]] = None,
) -> GeneratorSpec:
    """Build a :class:`GeneratorSpec`, filling in missing pieces numerically.

    A missing ``density_derivative`` becomes a central difference of the
    density with step ``max(1e-6, 1e-6 t)`` (one-sided near the origin). A
    missing ``survival_inverse`` becomes a bracketed root search on
    ``survival``.
    """
    survival = _vectorize(survival)
    density = _vectorize(density)
    if support_hint is None:
        support_hint = default_support_hint(survival)

    if density_derivative is None:
        def density_derivative(t):
            h = np.maximum(1e-6, 1e-6 * t)
            central = (density(t + h) - density(t - h)) / (2 * h)
            forward = (density(t + h) - density(t)) / h
            return np.where(t >= h, central, forward)
    density_derivative = _vectorize(density_derivative)

    analytic_inverse = survival_inverse is not None
    if survival_inverse is None:
        def survival_inverse(u):
            u = np.clip(u, 0.0, 1.0)
            root = monotone_root(survival, u, np.zeros_like(u),
                                 np.full_like(u, support_hint), increasing=False)
            return np.where(u >= 1.0, 0.0, np.where(u <= 0.0, np.inf, root))
    survival_inverse = _vectorize(survival_inverse)

    if log_survival is None:
        def log_survival(t):
            return np.log(survival(t))
    log_survival = _vectorize(log_survival)

    return GeneratorSpec(
        name=name,
        survival=survival,
        density=density,
        density_derivative=density_derivative,
        survival_inverse=survival_inverse,
        log_survival=log_survival,
        density_inverse=_vectorize(density_inverse) if density_inverse else None,
        support_hint=float(support_hint),
        params=dict(params or {}),
        analytic_survival_inverse=analytic_inverse,
    )


def make_exponential() -> GeneratorSpec:
    """Independence generator ``exp(-t)``."""
    return custom_generator(
        "exponential",
        survival=lambda t: np.exp(-t),
        density=lambda t: np.exp(-t),
        density_derivative=lambda t: -np.exp(-t),
        survival_inverse=lambda u: -np.log(u),
        density_inverse=lambda y: -np.log(y),
        log_survival=lambda t: -t,
    )


def make_pareto_II(gamma: float) -> GeneratorSpec:
    """Pareto type II survival ``(1 + t)^(-gamma)``.

    Yields the Clayton survival copula with ``theta = 1 / gamma``.
    """
    gamma = float(gamma)
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    return custom_generator(
        "pareto2",
        survival=lambda t: (1.0 + t) ** -gamma,
        density=lambda t: gamma * (1.0 + t) ** (-gamma - 1.0),
        density_derivative=lambda t: -gamma * (gamma + 1.0) * (1.0 + t) ** (-gamma - 2.0),
        survival_inverse=lambda u: u ** (-1.0 / gamma) - 1.0,
        density_inverse=lambda y: (y / gamma) ** (-1.0 / (gamma + 1.0)) - 1.0,
        log_survival=lambda t: -gamma * np.log1p(t),
        params={"gamma": gamma},
    )


TRUNC_NORMAL_C = 1.0 / float(special.ndtr(-1.0))
_LOG_C = math.log(TRUNC_NORMAL_C)
_LOG_2PI = math.log(2.0 * math.pi)


def _normal_pdf(z):
    return np.exp(-0.5 * z * z - 0.5 * _LOG_2PI)


def _trunc_normal_density_inverse(y):
    g0 = TRUNC_NORMAL_C * float(_normal_pdf(1.0))
    if np.any(~(y > 0)) or np.any(y > g0 * (1.0 + 1e-12)):
        raise DomainError(f"density inverse defined on (0, {g0:.10g}] only")
    arg = 2.0 * _LOG_C - _LOG_2PI - 2.0 * np.log(y)
    return -1.0 + np.sqrt(np.maximum(arg, 1.0))


def make_truncated_normal() -> GeneratorSpec:
    """Standard normal truncated to ``[1, inf)`` and shifted to the origin.

    ``Gbar(t) = c * Phi(-1 - t)`` with ``c = 1 / Phi(-1)``.
    """
    c = TRUNC_NORMAL_C
    return custom_generator(
        "trunc_normal",
        survival=lambda t: c * special.ndtr(-1.0 - t),
        density=lambda t: c * _normal_pdf(1.0 + t),
        density_derivative=lambda t: -c * (1.0 + t) * _normal_pdf(1.0 + t),
        survival_inverse=lambda u: -1.0 - special.ndtri(u / c),
        density_inverse=_trunc_normal_density_inverse,
        log_survival=lambda t: _LOG_C + special.log_ndtr(-1.0 - t),
        params={"c": c},
    )


def make_translated_erlang() -> GeneratorSpec:
    """``Gbar(t) = (2 + t)/2 * exp(-t)``; both inverses are numeric."""
    return custom_generator(
        "translated_erlang",
        survival=lambda t: 0.5 * (2.0 + t) * np.exp(-t),
        density=lambda t: 0.5 * (1.0 + t) * np.exp(-t),
        density_derivative=lambda t: -0.5 * t * np.exp(-t),
        log_survival=lambda t: np.log1p(0.5 * t) - t,
    )


def make_gumbel_barnett(theta: float) -> GeneratorSpec:
    """Generator of the Gumbel-Barnett copula, ``theta`` in ``(0, 1]``.

    The density has no closed-form inverse, so conditional quantiles under
    this generator are always found by root search.
    """
    theta = float(theta)
    if not 0.0 < theta <= 1.0:
        raise DomainError("theta must lie in (0, 1]")

    def log_survival(t):
        return -np.expm1(t) / theta

    def density(t):
        return np.exp(t - np.expm1(t) / theta) / theta

    def density_derivative(t):
        d = density(t)
        # past the underflow point exp(t) overflows; the product is 0 there
        with np.errstate(over="ignore"):
            return np.where(d > 0, d * (1.0 - np.exp(np.minimum(t, 700.0)) / theta), 0.0)

    return custom_generator(
        "gumbel_barnett",
        survival=lambda t: np.exp(log_survival(t)),
        density=density,
        density_derivative=density_derivative,
        survival_inverse=lambda u: np.log1p(-theta * np.log(u)),
        log_survival=log_survival,
        params={"theta": theta},
    )


CATALOG = {
    "exponential": make_exponential,
    "pareto2": make_pareto_II,
    "trunc_normal": make_truncated_normal,
    "translated_erlang": make_translated_erlang,
    "gumbel_barnett": make_gumbel_barnett,
}


@dataclass
class ValidationReport:
    generator: str
    grid: tuple
    boundary_error: float
    monotonicity_violations: int
    negative_density: int
    convexity_violations: int
    max_density_derivative: float
    tail_value: float
    tail_ok: bool
    roundtrip_max_error: float
    roundtrip_tol: float = 1e-10

    @property
    def failures(self) -> list[str]:
        out = []
        if self.boundary_error > 1e-12:
            out.append(f"Gbar(0) differs from 1 by {self.boundary_error:.3g}")
        if self.monotonicity_violations:
            out.append(f"{self.monotonicity_violations} monotonicity violations")
        if self.negative_density:
            out.append(f"{self.negative_density} grid points with negative density")
        if self.convexity_violations:
            out.append(f"{self.convexity_violations} convexity violations "
                       f"(max g' = {self.max_density_derivative:.3g})")
        if not self.tail_ok:
            out.append(f"tail check failed: Gbar(T) = {self.tail_value:.3g}")
        if not self.roundtrip_max_error <= self.roundtrip_tol:
            out.append(f"inverse round trip error {self.roundtrip_max_error:.3g}")
        return out

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [
            f"generator: {self.generator}",
            f"grid: [{self.grid[0]:.6g}, {self.grid[1]:.6g}] with {self.grid[2]} points",
            f"Gbar(0) error: {self.boundary_error:.3g}",
            f"monotonicity violations: {self.monotonicity_violations}",
            f"negative density points: {self.negative_density}",
            f"convexity violations: {self.convexity_violations} "
            f"(max g' = {self.max_density_derivative:.3g}, tol {TOL_CONVEX:g})",
            f"tail: Gbar(T) = {self.tail_value:.3g} ({'ok' if self.tail_ok else 'FAIL'})",
            f"inverse round trip max error: {self.roundtrip_max_error:.3g}",
            f"status: {'ok' if self.ok else 'FAIL'}",
        ]
        return "\n".join(lines)


def validate_generator(G: GeneratorSpec, grid_size: int = 256,
                       t_max: Optional[float] = None) -> ValidationReport:
    """Check admissibility of ``G`` on a grid over ``[0, t_max]``.

    ``t_max`` defaults to the support hint. The tail check requires
    ``0 < Gbar(T) < 1e-12`` at the support hint, so generators with
    bounded support (not strict) fail it.
    """
    if grid_size < 16:
        raise DomainError("grid_size must be at least 16")
    T = G.support_hint
    t_max = T if t_max is None else float(t_max)
    t = np.linspace(0.0, t_max, grid_size)
    sv = np.asarray(G.survival(t))
    dens = np.asarray(G.density(t))
    dd = np.asarray(G.density_derivative(t))

    positive = sv > 0
    steps = np.diff(sv)
    mono = int(np.sum((steps >= 0) & positive[1:]))
    convex_bad = dd > TOL_CONVEX
    tail = float(G.survival(T))

    u = np.geomspace(1e-6, 1 - 1e-6, grid_size)
    rt = np.abs(np.asarray(G.survival(G.survival_inverse(u))) - u)

    return ValidationReport(
        generator=repr(G),
        grid=(0.0, t_max, grid_size),
        boundary_error=abs(float(G.survival(0.0)) - 1.0),
        monotonicity_violations=mono,
        negative_density=int(np.sum(dens < 0)),
        convexity_violations=int(np.sum(convex_bad)),
        max_density_derivative=float(np.max(dd)),
        tail_value=tail,
        tail_ok=bool(0.0 < tail < TAIL_EPS),
        roundtrip_max_error=float(np.nanmax(rt)) if np.all(np.isfinite(rt)) else math.inf,
    )
