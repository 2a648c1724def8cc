"""Modulus of continuity on uniform grids.

``omega(f, delta) = sup { |f(x) - f(y)| : |x - y| <= delta }`` is estimated
from below: every pair the estimator inspects is admissible, so refining
the grid can only raise the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .funcspace import FunctionHandle

CONVERGENCE_TOL = 1e-6
MAX_POINTS = 2**20


@dataclass(frozen=True)
class ModulusEstimate:
    delta: float
    value: float
    resolution: int
    converged: bool
    error: float = 0.0

    def __post_init__(self):
        for name in ("delta", "value", "error"):
            object.__setattr__(self, name, float(getattr(self, name)))


def grid_oscillation(values: np.ndarray, window: int, periodic: bool = False) -> float:
    """Largest ``max - min`` over runs of ``window + 1`` consecutive samples."""
    v = np.ascontiguousarray(values, dtype=float)
    n = v.size
    if window <= 0:
        return 0.0
    if periodic:
        if window >= n - 1:
            return float(v.max() - v.min())
        v = np.ascontiguousarray(np.concatenate([v, v[:window]]))
        wmax, wmin = kernels.sliding_extrema(v, window)
        return float(np.max(wmax[:n] - wmin[:n]))
    if window >= n - 1:
        return float(v.max() - v.min())
    wmax, wmin = kernels.sliding_extrema(v, window)
    return float(np.max(wmax - wmin))


def _window(delta: float, h: float) -> int:
    return int(math.floor(delta / h * (1 + 1e-12)))


def _estimate_interval(f: FunctionHandle, delta: float, n: int) -> float:
    a, b = f.domain
    x = np.linspace(a, b, n)
    v = f(x)
    if delta >= b - a:
        return float(v.max() - v.min())
    h = (b - a) / (n - 1)
    w = _window(delta, h)
    if w >= n - 1:
        return float(v.max() - v.min())
    if w > 0:
        wmax, wmin = kernels.sliding_extrema(np.ascontiguousarray(v), w)
    else:
        wmax = wmin = v
    best = float(np.max(wmax - wmin))
    # exact-offset partners x +/- delta close the gap left by the grid spacing
    right = np.flatnonzero(x + delta <= b)
    fr = f(x[right] + delta)
    best = max(best, float(np.max(np.maximum(np.abs(fr - wmin[right]), np.abs(wmax[right] - fr)))))
    left = np.flatnonzero(x - delta >= a)
    fl = f(x[left] - delta)
    start = left - w
    best = max(best, float(np.max(np.maximum(np.abs(fl - wmin[start]), np.abs(wmax[start] - fl)))))
    return best


def _estimate_circle(f: FunctionHandle, delta: float, n: int) -> float:
    a = f.a
    period = f.length
    h = period / n
    x = a + h * np.arange(n)
    v = f(x)
    if delta >= 0.5 * period:
        return float(v.max() - v.min())
    w = _window(delta, h)
    ext = np.ascontiguousarray(np.concatenate([v, v[:w]]))
    if w > 0:
        wmax, wmin = kernels.sliding_extrema(ext, w)
        wmax, wmin = wmax[:n], wmin[:n]
    else:
        wmax = wmin = v
    best = float(np.max(wmax - wmin))
    fr = f.periodic_eval(x + delta)
    best = max(best, float(np.max(np.maximum(np.abs(fr - wmin), np.abs(wmax - fr)))))
    return best


def _estimate(f: FunctionHandle, delta: float, n: int) -> float:
    if f.periodic:
        return _estimate_circle(f, delta, n)
    return _estimate_interval(f, delta, n)


def _refine(n: int, periodic: bool) -> int:
    # nested grids: the new point set contains the old one
    return 2 * n if periodic else 2 * n - 1


def modulus_of_continuity(
    f: FunctionHandle,
    delta: float,
    resolution: int = 1024,
    tol: float = CONVERGENCE_TOL,
    max_points: int = MAX_POINTS,
) -> ModulusEstimate:
    """Estimate ``omega(f, delta)``; periodic ``f`` is treated on the circle.

    The grid is doubled until two successive estimates differ by less
    than ``tol`` or ``max_points`` is reached.  ``error`` is ``L h`` (grid
    spacing ``h``, so at most ``2L/N``) when ``f`` carries a Lipschitz
    constant ``L``, else the last change.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    n = resolution
    value = _estimate(f, delta, n)
    change = math.inf
    converged = False
    while True:
        n_next = _refine(n, f.periodic)
        if n_next > max_points:
            break
        nxt = _estimate(f, delta, n_next)
        change = abs(nxt - value)
        n, value = n_next, max(value, nxt)
        if change < tol:
            converged = True
            break
    if f.lipschitz is not None:
        spacing = f.length / (n if f.periodic else n - 1)
        error = f.lipschitz * spacing
    else:
        error = change if math.isfinite(change) else tol
    return ModulusEstimate(float(delta), value, n, converged, error)


def modulus_profile(
    f: FunctionHandle, deltas: Sequence[float], resolution: int = 1024, tol: float = CONVERGENCE_TOL
) -> list:
    """``modulus_of_continuity`` for each delta, in input order.

    Values are made monotone in delta: an estimate for a smaller delta is
    also a lower bound for every larger one.
    """
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise ValueError("deltas must be nonempty")
    raw = [modulus_of_continuity(f, d, resolution, tol) for d in deltas]
    order = sorted(range(len(deltas)), key=lambda i: deltas[i])
    running = 0.0
    out: list[Optional[ModulusEstimate]] = [None] * len(deltas)
    for i in order:
        est = raw[i]
        running = max(running, est.value)
        out[i] = ModulusEstimate(est.delta, running, est.resolution, est.converged, est.error)
    return out
