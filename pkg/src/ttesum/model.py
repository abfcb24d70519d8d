"""TTE dependence models in their distortion representation.

The joint survival is ``Gbar(R1(x1) + R2(x2))`` where ``Ri = -ln Hbar_i`` is
the cumulative hazard of the baseline survival ``Hbar_i``. Baselines are
stored through ``Ri`` rather than ``Hbar_i`` because every formula consumes
``-ln Hbar_i`` and this keeps far tails accurate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .generators import GeneratorSpec


def _as_float(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class BaselineMarginal:
    """Baseline survival ``Hbar = exp(-R)`` with hazard ``r = R'``."""

    name: str
    cumhazard: Callable
    hazard: Callable
    cumhazard_inverse: Callable
    rate: Optional[float] = None

    def survival(self, x):
        return np.exp(-self.cumhazard(x))

    def survival_inverse(self, u):
        with np.errstate(divide="ignore"):
            return self.cumhazard_inverse(-np.log(u))


def exponential_baseline(rate: float) -> BaselineMarginal:
    rate = float(rate)
    if not rate > 0:
        raise DomainError("baseline rate must be positive")
    return BaselineMarginal(
        name=f"exponential(rate={rate:g})",
        cumhazard=lambda x: rate * np.asarray(x, dtype=float) + 0.0,
        hazard=lambda x: _as_float(np.full(np.shape(x), rate), x),
        cumhazard_inverse=lambda y: np.asarray(y, dtype=float) / rate + 0.0,
        rate=rate,
    )


def generator_baseline(G: GeneratorSpec) -> BaselineMarginal:
    """Use the generator's own survival as baseline, ``Hbar = Gbar``."""

    def hazard(x):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.exp(np.log(G.density(x)) - G.log_survival(x))

    def cumhazard_inverse(y):
        with np.errstate(over="ignore", under="ignore"):
            return G.survival_inverse(np.exp(-np.asarray(y, dtype=float)))

    return BaselineMarginal(
        name=f"generator({G.name})",
        cumhazard=lambda x: -G.log_survival(x),
        hazard=hazard,
        cumhazard_inverse=cumhazard_inverse,
    )


@dataclass(frozen=True)
class GKParams:
    """Scale rates of the model ``Gbar(alpha x1 + beta x2)``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError("alpha and beta must be positive")

    @property
    def equal_rates(self) -> bool:
        return abs(self.alpha - self.beta) <= 1e-12 * max(self.alpha, self.beta)


@dataclass(frozen=True)
class TTEModel:
    generator: GeneratorSpec
    baseline1: BaselineMarginal
    baseline2: BaselineMarginal
    gk: Optional[GKParams] = None

    def baseline(self, i: int) -> BaselineMarginal:
        if i == 1:
            return self.baseline1
        if i == 2:
            return self.baseline2
        raise DomainError("component index must be 1 or 2")

    def cutoff(self, i: int) -> float:
        """Point beyond which the i-th marginal survival is below 1e-12."""
        return float(self.baseline(i).cumhazard_inverse(self.generator.support_hint))

    def describe(self) -> str:
        if self.gk is not None:
            return (f"GK({self.generator!r}, alpha={self.gk.alpha:g}, "
                    f"beta={self.gk.beta:g})")
        return (f"TTE({self.generator!r}, {self.baseline1.name}, "
                f"{self.baseline2.name})")


def gk_as_tte(G: GeneratorSpec, p: GKParams) -> TTEModel:
    """GK model as a TTE model with exponential baselines of rates alpha, beta."""
    return TTEModel(G, exponential_baseline(p.alpha), exponential_baseline(p.beta), gk=p)


def gk_model(G: GeneratorSpec, alpha: float, beta: float) -> TTEModel:
    return gk_as_tte(G, GKParams(float(alpha), float(beta)))


def distortion(G: GeneratorSpec, u, v):
    """Bivariate distortion ``Gbar(-ln(u v))``; zero where ``u v = 0``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
        raise DomainError("distortion arguments must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        arg = -np.log(u) - np.log(v)
    out = np.where(np.isinf(arg), 0.0, G.survival(np.where(np.isinf(arg), 0.0, arg)))
    return _as_float(out, u * v)


def univariate_distortion(G: GeneratorSpec, u):
    return distortion(G, u, np.ones_like(np.asarray(u, dtype=float)))


def joint_survival(m: TTEModel, x1, x2):
    return m.generator.survival(m.baseline1.cumhazard(x1) + m.baseline2.cumhazard(x2))


def joint_pdf(m: TTEModel, x1, x2):
    """Joint density ``r1(x1) r2(x2) Gbar''(R1 + R2)`` with ``Gbar'' = -g'``."""
    t = m.baseline1.cumhazard(x1) + m.baseline2.cumhazard(x2)
    return m.baseline1.hazard(x1) * m.baseline2.hazard(x2) * -m.generator.density_derivative(t)


def marginal_survival(m: TTEModel, i: int, x):
    return m.generator.survival(m.baseline(i).cumhazard(x))


def marginal_pdf(m: TTEModel, i: int, x):
    b = m.baseline(i)
    return b.hazard(x) * m.generator.density(b.cumhazard(x))


def marginal_hazard(m: TTEModel, i: int, x):
    return marginal_pdf(m, i, x) / marginal_survival(m, i, x)


def marginal_survival_inverse(m: TTEModel, i: int, u):
    """Inverse of the i-th marginal survival, ``R_i^{-1}(Gbar^{-1}(u))``."""
    return m.baseline(i).cumhazard_inverse(m.generator.survival_inverse(u))


def survival_copula(m: TTEModel, u, v):
    """Archimedean survival copula ``Gbar(Gbar^{-1}(u) + Gbar^{-1}(v))``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
        raise DomainError("copula arguments must lie in [0, 1]")
    G = m.generator
    degenerate = (u <= 0) | (v <= 0)
    uu = np.where(degenerate, 1.0, u)
    vv = np.where(degenerate, 1.0, v)
    out = np.where(degenerate, 0.0, G.survival(G.survival_inverse(uu) + G.survival_inverse(vv)))
    return _as_float(out, u * v)
