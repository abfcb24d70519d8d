"""Quadrature and monotone root finding used throughout the engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import QuadratureError, RootFindError


@dataclass(frozen=True)
class QuadratureCfg:
    """Tolerances for adaptive Gauss-Kronrod integration."""

    epsabs: float = 1e-10
    epsrel: float = 1e-8
    limit: int = 2000


DEFAULT_QUAD = QuadratureCfg()

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]


def _gk15(func, a, b):
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    x = center[:, None] + half[:, None] * NODES[None, :]
    with np.errstate(all="ignore"):
        fx = np.asarray(func(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    return kron, np.abs(kron - gauss)


def integrate(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: Optional[QuadratureCfg] = None,
    points: Iterable[float] = (),
) -> float:
    """Adaptive Gauss-Kronrod (G7/K15) integral of ``func`` over ``[a, b]``.

    ``func`` is called with a 1-d array of nodes and must return the
    integrand at each. The range is first split at ``points``; intervals
    whose error estimate exceeds their length-proportional share of the
    tolerance are bisected until the summed estimate meets
    ``max(epsabs, epsrel * |result|)``. Raises :class:`QuadratureError`
    when more than ``cfg.limit`` intervals would be needed or the integrand
    is not finite. A reversed range flips the sign.
    """
    cfg = cfg or DEFAULT_QUAD
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if b < a:
        return -integrate(func, b, a, cfg, points)
    cuts = np.array(sorted({a, b, *(float(p) for p in points if a < p < b)}))
    lo, hi = cuts[:-1], cuts[1:]
    val, err = _gk15(func, lo, hi)
    length = b - a
    while True:
        total = float(val.sum())
        total_err = float(err.sum())
        if not np.isfinite(total):
            raise QuadratureError("integrand is not finite on the range",
                                  estimate=total, abserr=total_err)
        tol = max(cfg.epsabs, cfg.epsrel * abs(total))
        if total_err <= tol:
            return total
        width = hi - lo
        split = (err > tol * width / length) & (width > 1e-13 * max(abs(a), abs(b), 1.0))
        if not split.any():
            # remaining error sits on intervals at floating-point resolution
            return total
        if lo.size + split.sum() > cfg.limit:
            raise QuadratureError(
                f"quadrature on [{a:.6g}, {b:.6g}] exceeded {cfg.limit} intervals "
                f"(estimate={total:.10g}, error={total_err:.3g}, tolerance={tol:.3g})",
                estimate=total, abserr=total_err)
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_val, new_err = _gk15(func, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])


def monotone_root(
    func: Callable[[np.ndarray], np.ndarray],
    target,
    lo,
    hi,
    *,
    increasing: bool = True,
    expand: bool = True,
    max_expand: int = 64,
    xtol: float = 0.0,
    max_iter: int = 2000,
):
    """Solve ``func(t) == target`` for a monotone ``func``, elementwise.

    ``lo``/``hi`` give the starting bracket. With ``expand`` the upper end
    moves away from ``lo`` by doubling the width until the target is
    straddled. ``func`` always receives arrays aligned with ``target``, so it
    may close over per-element parameters. The bracket is then bisected until it cannot shrink further
    in floating point (or its width drops below ``xtol``).
    Works on arrays; scalar inputs give a float back.
    """
    scalar = np.ndim(target) == 0 and np.ndim(lo) == 0 and np.ndim(hi) == 0
    sign = 1.0 if increasing else -1.0
    target, lo, hi = np.broadcast_arrays(
        np.asarray(target, dtype=float), np.asarray(lo, dtype=float),
        np.asarray(hi, dtype=float))
    shape = target.shape
    target = sign * target.ravel()
    lo = lo.ravel().copy()
    hi = hi.ravel().copy()

    def f(t):
        return sign * np.asarray(func(t), dtype=float)

    with np.errstate(all="ignore"):
        f_lo = f(lo)
        if np.any(f_lo > target):
            raise RootFindError(
                "target lies below the function value at the left bracket end",
                bracket=(lo, hi))
        f_hi = f(hi)
        for _ in range(max_expand):
            short = f_hi < target
            if not short.any():
                break
            if not expand:
                raise RootFindError("target not bracketed", bracket=(lo, hi))
            width = hi - lo
            hi = np.where(short, lo + 2.0 * np.maximum(width, 1e-300), hi)
            f_hi = f(hi)
        else:
            if np.any(f_hi < target):
                raise RootFindError(
                    f"bracket expansion exhausted after {max_expand} doublings",
                    bracket=(lo, hi))

        active = np.ones(target.shape, dtype=bool)
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            stuck = (mid <= lo) | (mid >= hi) | (hi - lo <= xtol)
            active &= ~stuck
            if not active.any():
                break
            f_mid = f(mid)
            go_right = active & (f_mid < target)
            go_left = active & ~go_right
            lo = np.where(go_right, mid, lo)
            hi = np.where(go_left, mid, hi)
        f_lo = f(lo)
        f_hi = f(hi)
        root = np.where(np.abs(f_hi - target) <= np.abs(target - f_lo), hi, lo)
    return float(root[0]) if scalar else root.reshape(shape)
