"""Sampling, moment estimation, quantile regression and numeric moments.

Random numbers come from the Philox4x64-10 counter-based generator keyed by
the 64-bit seed. Sample ``i`` uses keystream words ``2i`` (for ``X1``) and
``2i + 1`` (for ``S | X1``), each mapped to ``((w >> 11) + 0.5) / 2**53``.
Any index range can therefore be generated independently and the result
matches a single sequential run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import QuadratureCfg, integrate
from .conditional import (
    S_GIVEN_X1, ConfidenceBand, cond_survival_quantile_s_given_x1,
)
from .convolution import joint_df_gk, joint_survival_x1_s, sum_survival
from .errors import DomainError, EstimationError
from .model import TTEModel, joint_survival, marginal_survival, marginal_survival_inverse

MOMENT_QUAD = QuadratureCfg(epsabs=1e-12, epsrel=1e-10, limit=4000)
MOMENTS = ("mean1", "mean2", "var1", "var2", "cov12", "cov1S")


def uniform_pairs(seed: int, start: int, stop: int) -> tuple:
    """Uniforms ``(U_i, V_i)`` for ``start <= i < stop`` from the keyed stream."""
    if not 0 <= start <= stop:
        raise DomainError("need 0 <= start <= stop")
    # each Philox block yields four words, i.e. two sample pairs
    first_block = start // 2
    last_block = (stop + 1) // 2
    bitgen = np.random.Philox(key=int(seed) & (2**64 - 1))
    bitgen.advance(first_block)
    words = bitgen.random_raw(4 * (last_block - first_block))
    unif = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    pairs = unif.reshape(-1, 2)[start - 2 * first_block: stop - 2 * first_block]
    return pairs[:, 0].copy(), pairs[:, 1].copy()


@dataclass
class SamplePairs:
    seed: int
    n: int
    x1: np.ndarray
    x2: np.ndarray
    s: np.ndarray


def sample_pairs(m: TTEModel, n: int, seed: int, start: int = 0) -> SamplePairs:
    """Draw ``(X1, X2, S)`` by marginal then conditional inversion.

    ``X1 = F1bar^{-1}(U)`` and ``S = Fbar_{S|X1}^{-1}(V | X1)``; ``X2`` is
    the difference, and ``S`` is recomputed as ``X1 + X2`` so the identity
    holds exactly in floating point.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    u, v = uniform_pairs(seed, start, start + n)
    x1 = np.asarray(marginal_survival_inverse(m, 1, u), dtype=float)
    s = np.asarray(cond_survival_quantile_s_given_x1(m, v, x1), dtype=float)
    x2 = np.maximum(s - x1, 0.0)
    bad = ~(np.isfinite(x1) & np.isfinite(x2))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DomainError(f"inversion failed at index {start + i}: u={u[i]!r}, "
                          f"v={v[i]!r}, x1={x1[i]!r}, s={s[i]!r}")
    return SamplePairs(int(seed), int(n), x1, x2, x1 + x2)


def _tie_pairs(values) -> int:
    _, counts = np.unique(values, return_counts=True, axis=0)
    return int(np.sum(counts * (counts - 1) // 2))


def _count_inversions(ranks: np.ndarray) -> int:
    """Pairs ``i < j`` with ``ranks[i] > ranks[j]``, via a Fenwick tree."""
    size = int(ranks.max()) + 1
    tree = [0] * (size + 1)
    inversions = 0
    for seen, r in enumerate(ranks.tolist()):
        # count earlier entries with rank <= r
        k, le = r + 1, 0
        while k > 0:
            le += tree[k]
            k -= k & -k
        inversions += seen - le
        k = r + 1
        while k <= size:
            tree[k] += 1
            k += k & -k
    return inversions


def kendall_tau(x, y) -> float:
    """Kendall's tau-a; tied pairs count as neither concordant nor discordant.

    Sorting by ``x`` (then ``y``) turns discordant pairs into inversions of
    the ``y`` sequence, counted in O(n log n).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 2 or y.size != n:
        raise DomainError("need two equal-length samples with n >= 2")
    order = np.lexsort((y, x))
    _, ranks = np.unique(y[order], return_inverse=True)
    discordant = _count_inversions(ranks)
    total = n * (n - 1) // 2
    ties_x = _tie_pairs(x)
    ties_y = _tie_pairs(y)
    ties_xy = _tie_pairs(np.column_stack([x, y]))
    return (total - ties_x - ties_y + ties_xy - 2 * discordant) / total


@dataclass
class FitResult:
    tau_hat: float
    gamma_hat: float
    alpha_hat: float
    beta_hat: float
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"tau_hat": self.tau_hat, "gamma_hat": self.gamma_hat,
                "alpha_hat": self.alpha_hat, "beta_hat": self.beta_hat,
                "diagnostics": dict(self.diagnostics)}


def clayton_pareto_moments(tau_hat: float, mean1: float, mean2: float) -> FitResult:
    """Moment estimates for the Pareto II GK model.

    ``gamma = (1 - tau)/(2 tau)`` inverts Kendall's tau of the Clayton
    copula; the rates follow from ``E(X1) = 1/(alpha (gamma - 1))`` and
    ``E(X2) = 1/(beta (gamma - 1))``.
    """
    if not 0 < tau_hat < 1:
        raise EstimationError(f"tau_hat={tau_hat:g} outside (0, 1); no Clayton fit")
    if not (mean1 > 0 and mean2 > 0):
        raise EstimationError("sample means must be positive")
    gamma = (1.0 - tau_hat) / (2.0 * tau_hat)
    # tau_hat = 1/3 lands on gamma = 1 up to rounding
    if not gamma > 1.0 + 1e-12:
        raise EstimationError(
            f"gamma_hat={gamma:g} <= 1: the Pareto mean does not exist")
    alpha = 1.0 / ((gamma - 1.0) * mean1)
    beta = 1.0 / ((gamma - 1.0) * mean2)
    return FitResult(tau_hat, gamma, alpha, beta, diagnostics={
        "mean1": mean1, "mean2": mean2, "gamma_minus_one": gamma - 1.0,
        "theta_hat": 1.0 / gamma,
    })


def fit_clayton_pareto(pairs: SamplePairs) -> FitResult:
    tau = kendall_tau(pairs.x1, pairs.x2)
    fit = clayton_pareto_moments(tau, float(np.mean(pairs.x1)), float(np.mean(pairs.x2)))
    fit.diagnostics["n"] = int(pairs.x1.size)
    return fit


def pinball_loss(residuals, q: float) -> float:
    r = np.asarray(residuals, dtype=float)
    return float(np.sum(np.where(r >= 0, q * r, (q - 1.0) * r)))


def candidate_lines(xs, ys) -> tuple:
    """Intercepts and slopes of all lines through two points with distinct x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    i, j = np.triu_indices(xs.size, k=1)
    keep = xs[i] != xs[j]
    i, j = i[keep], j[keep]
    slope = (ys[j] - ys[i]) / (xs[j] - xs[i])
    return ys[i] - slope * xs[i], slope


def linear_quantile_fit(xs, ys, q: float = 0.5, chunk: int = 4096) -> tuple:
    """Exact minimizer ``(intercept, slope)`` of the pinball loss.

    Some optimal line always interpolates two data points, so every such
    line is scored. Ties (relative 1e-12) go to the smaller ``|slope|``,
    then the smaller ``|intercept|``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size != ys.size or xs.size < 3:
        raise DomainError("need at least three (x, y) pairs")
    if not 0 < q < 1:
        raise DomainError("q must lie in (0, 1)")
    if np.all(xs == xs[0]):
        raise DomainError("all x values are equal; slope is not identifiable")
    a, b = candidate_lines(xs, ys)
    loss = np.empty(a.size)
    for k in range(0, a.size, chunk):
        r = ys[None, :] - a[k:k + chunk, None] - b[k:k + chunk, None] * xs[None, :]
        loss[k:k + chunk] = np.sum(np.where(r >= 0, q * r, (q - 1.0) * r), axis=1)
    best = loss.min()
    tied = np.flatnonzero(loss <= best + 1e-12 * max(abs(best), 1e-300))
    order = np.lexsort((np.abs(a[tied]), np.abs(b[tied])))
    k = tied[order[0]]
    return float(a[k]), float(b[k])


def empirical_coverage(m: TTEModel, band: ConfidenceBand, n: int, seed: int,
                       pairs: SamplePairs | None = None) -> float:
    """Fraction of sampled points that fall inside ``band``."""
    if pairs is None:
        if n < 100:
            raise DomainError("coverage checks need n >= 100")
        pairs = sample_pairs(m, n, seed)
    if band.lower.direction == S_GIVEN_X1:
        cond, target = pairs.x1, pairs.s
    else:
        cond, target = pairs.s, pairs.x1
    lo = np.asarray(band.lower(cond), dtype=float)
    hi = np.asarray(band.upper(cond), dtype=float)
    return float(np.mean((lo <= target) & (target <= hi)))


def ks_distance(sample, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance of ``sample`` against ``cdf``."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


# numeric moments ---------------------------------------------------------

def _log_marginal_survival(m, i):
    G, base = m.generator, m.baseline(i)
    return lambda t: float(G.log_survival(base.cumhazard(t)))


def _moment_cutoff(log_surv, power: int) -> float:
    # t^(p+1) Fbar(t) bounds the neglected tail up to a constant for
    # polynomial tails; it never gets small when the moment is infinite
    limit = math.log(1e-14)
    for k in range(-10, 1020):
        t = math.ldexp(1.0, k)
        log_tail = log_surv(t)
        if log_tail < limit and (power + 1) * k * math.log(2.0) + log_tail < limit:
            return t
    raise DomainError(f"moment of order {power + 1} does not appear to be finite")


def _breaks(T: float) -> list:
    out, t = [], T
    while t > 1e-3 and len(out) < 60:
        t *= 0.5
        out.append(t)
    return out


def _raw_moment(m, i, power, quad):
    surv = lambda t: marginal_survival(m, i, t)
    T = _moment_cutoff(_log_marginal_survival(m, i), power)
    val = integrate(lambda t: (power + 1) * t ** power * surv(t), 0.0, T, quad, _breaks(T))
    return val


def _mixed_survival_integral(surv2d, T1, T2, quad):
    def outer(a):
        return np.array([integrate(lambda b: surv2d(ai, b), 0.0, T2, quad, _breaks(T2))
                         for ai in np.ravel(a)])
    return integrate(outer, 0.0, T1, quad, _breaks(T1))


def _cross_moment(m, quad):
    T1 = _moment_cutoff(_log_marginal_survival(m, 1), 0)
    T2 = _moment_cutoff(_log_marginal_survival(m, 2), 0)
    return _mixed_survival_integral(lambda a, b: joint_survival(m, a, b), T1, T2, quad)


def _x1_s_survival(m, quad):
    """``P(X1 > a, S > b)`` as a vectorized function of ``b`` for fixed ``a``."""
    def surv(a, b):
        b = np.asarray(b, dtype=float)
        above = marginal_survival(m, 1, np.maximum(a, b))
        inside = b > a
        if not inside.any():
            return above
        if m.gk is not None:
            bb = np.where(inside, b, a)
            val = (marginal_survival(m, 1, a) + sum_survival(m, bb) - 1.0
                   + joint_df_gk(m.generator, m.gk, a, bb))
        else:
            val = np.array([joint_survival_x1_s(m, a, bv, quad) if bv > a else 0.0
                            for bv in b.ravel()]).reshape(b.shape)
        return np.where(inside, val, above)
    return surv


def _cross_moment_x1_s(m, quad):
    T1 = _moment_cutoff(_log_marginal_survival(m, 1), 0)
    T2 = _moment_cutoff(_log_marginal_survival(m, 2), 0)
    return _mixed_survival_integral(_x1_s_survival(m, quad), T1, T1 + T2, quad)


def moment_table(m: TTEModel, quad: QuadratureCfg = MOMENT_QUAD) -> dict:
    """Means, variances and covariances by quadrature of survival functions.

    For nonnegative variables ``E(X^k) = k int t^(k-1) Fbar(t) dt`` and
    ``E(XY) = int int P(X > a, Y > b) da db``. ``cov1S`` is computed from the
    joint survival of ``(X1, S)``; ``cov1S_identity`` is ``var1 + cov12``.
    """
    mean1 = _raw_moment(m, 1, 0, quad)
    mean2 = _raw_moment(m, 2, 0, quad)
    var1 = _raw_moment(m, 1, 1, quad) - mean1 ** 2
    var2 = _raw_moment(m, 2, 1, quad) - mean2 ** 2
    cov12 = _cross_moment(m, quad) - mean1 * mean2
    cov1s = _cross_moment_x1_s(m, quad) - mean1 * (mean1 + mean2)
    return {"mean1": mean1, "mean2": mean2, "var1": var1, "var2": var2,
            "cov12": cov12, "cov1S": cov1s, "cov1S_identity": var1 + cov12}


def numeric_moments(m: TTEModel, which: str, quad: QuadratureCfg = MOMENT_QUAD) -> float:
    if which not in MOMENTS:
        raise DomainError(f"unknown moment {which!r}; choose from {MOMENTS}")
    if which in ("mean1", "mean2"):
        return _raw_moment(m, int(which[-1]), 0, quad)
    if which in ("var1", "var2"):
        i = int(which[-1])
        return _raw_moment(m, i, 1, quad) - _raw_moment(m, i, 0, quad) ** 2
    mean1 = _raw_moment(m, 1, 0, quad)
    mean2 = _raw_moment(m, 2, 0, quad)
    if which == "cov12":
        return _cross_moment(m, quad) - mean1 * mean2
    return _cross_moment_x1_s(m, quad) - mean1 * (mean1 + mean2)
