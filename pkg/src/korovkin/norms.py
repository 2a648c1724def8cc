"""Norms of the Banach function spaces used with the Korovkin bounds.

One kernel per space kind.  Integral-type norms run on an adaptively
refined node rule; interval suprema (Morrey) scan all grid intervals and
then polish the best endpoints; set suprema (small Morrey, weak ``M_p``)
use the decreasing rearrangement of midpoint samples, for which the
supremum over measurable sets reduces to a supremum over initial segments.

Every kernel returns a :class:`NormResult` whose ``est_error`` is a
first-order discretisation estimate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from . import kernels
from .errors import InvalidSpace
from .funcspace import (
    DEFAULT_QUADRATURE,
    UNIT_INTERVAL,
    FunctionHandle,
    QuadratureConfig,
    cell_midpoints,
    constant,
    decreasing_rearrangement,
    integrate_cells,
    refined_rule,
    sample,
)

WEIGHT_CLIP = 1e12
_PROBES = 257
_EPS_NODES = 64
# logistic spread of the grand-norm epsilon grid; nodes reach ~1e-13 of either end
_EPS_SPREAD = 30.0


class SpaceKind(str, enum.Enum):
    SUP = "sup"
    LP = "lp"
    WEIGHTED_LP = "weighted-lp"
    GRAND_LP = "grand-lp"
    WEIGHTED_GRAND_LP = "weighted-grand-lp"
    VARIABLE_LP = "variable-lp"
    ORLICZ = "orlicz"
    MORREY = "morrey"
    WEIGHTED_MORREY = "weighted-morrey"
    SMALL_MORREY = "small-morrey"
    WEAK_MP = "weak-mp"


_WEIGHTED = {SpaceKind.WEIGHTED_LP, SpaceKind.WEIGHTED_GRAND_LP, SpaceKind.WEIGHTED_MORREY}


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    """A Banach function space over ``domain`` (``[0, 1]`` unless periodic).

    Only the fields relevant to ``kind`` are used; validation happens on
    construction and raises :class:`InvalidSpace`.

    ``weight`` and ``exponent_fn`` are :class:`FunctionHandle` objects on
    ``domain``.  ``young_phi`` (and the optional complementary
    ``young_psi``) are vectorised callables on ``[0, inf)``.
    """

    kind: SpaceKind
    p: Optional[float] = None
    p0: Optional[float] = None
    lam: Optional[float] = None
    weight: Optional[FunctionHandle] = None
    exponent_fn: Optional[FunctionHandle] = None
    young_phi: Optional[Callable] = None
    young_psi: Optional[Callable] = None
    resolution: int = 1024
    domain: tuple = UNIT_INTERVAL
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE
    name: str = ""
    _clip_flag: list = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", SpaceKind(self.kind))
        except ValueError as exc:
            raise InvalidSpace(f"unknown space kind {self.kind!r}") from exc
        a, b = (float(t) for t in self.domain)
        if not a < b:
            raise InvalidSpace("domain must be an interval a < b")
        object.__setattr__(self, "domain", (a, b))
        if int(self.resolution) != self.resolution or self.resolution < 1:
            raise InvalidSpace("resolution must be a positive integer")
        object.__setattr__(self, "resolution", int(self.resolution))
        _validate(self)

    # convenience constructors -------------------------------------------

    @classmethod
    def sup(cls, **kw):
        return cls(SpaceKind.SUP, **kw)

    @classmethod
    def lp(cls, p, **kw):
        return cls(SpaceKind.LP, p=p, **kw)

    @classmethod
    def weighted_lp(cls, p, weight, **kw):
        return cls(SpaceKind.WEIGHTED_LP, p=p, weight=weight, **kw)

    @classmethod
    def grand_lp(cls, p, **kw):
        return cls(SpaceKind.GRAND_LP, p=p, **kw)

    @classmethod
    def weighted_grand_lp(cls, p, weight, **kw):
        return cls(SpaceKind.WEIGHTED_GRAND_LP, p=p, weight=weight, **kw)

    @classmethod
    def variable_lp(cls, exponent_fn, **kw):
        return cls(SpaceKind.VARIABLE_LP, exponent_fn=exponent_fn, **kw)

    @classmethod
    def orlicz(cls, young_phi, young_psi=None, **kw):
        return cls(SpaceKind.ORLICZ, young_phi=young_phi, young_psi=young_psi, **kw)

    @classmethod
    def morrey(cls, p, p0, **kw):
        return cls(SpaceKind.MORREY, p=p, p0=p0, **kw)

    @classmethod
    def weighted_morrey(cls, p, p0, weight, **kw):
        return cls(SpaceKind.WEIGHTED_MORREY, p=p, p0=p0, weight=weight, **kw)

    @classmethod
    def small_morrey(cls, p, lam, **kw):
        return cls(SpaceKind.SMALL_MORREY, p=p, lam=lam, **kw)

    @classmethod
    def weak_mp(cls, p, **kw):
        return cls(SpaceKind.WEAK_MP, p=p, **kw)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        k = self.kind
        if k is SpaceKind.SUP:
            return "Sup"
        if k is SpaceKind.LP:
            return f"L{self.p:g}"
        if k is SpaceKind.WEIGHTED_LP:
            return f"L{self.p:g},w"
        if k is SpaceKind.GRAND_LP:
            return f"GrandL{self.p:g}"
        if k is SpaceKind.WEIGHTED_GRAND_LP:
            return f"GrandL{self.p:g},w"
        if k is SpaceKind.VARIABLE_LP:
            return f"L[{self.exponent_fn.name or 'p(.)'}]"
        if k is SpaceKind.ORLICZ:
            return "Orlicz"
        if k is SpaceKind.MORREY:
            return f"Morrey({self.p:g},{self.p0:g})"
        if k is SpaceKind.WEIGHTED_MORREY:
            return f"Morrey({self.p:g},{self.p0:g}),w"
        if k is SpaceKind.SMALL_MORREY:
            return f"SM({self.p:g},{self.lam:g})"
        return f"M{self.p:g}"

    def clipped_weight(self, x):
        """Weight values clipped to ``[0, WEIGHT_CLIP]``; records when clipping fires."""
        raw = self.weight._call(np.asarray(x, dtype=float))
        raw = np.where(np.isnan(raw), np.inf, raw)
        out = np.clip(raw, 0.0, WEIGHT_CLIP)
        if np.any(raw > WEIGHT_CLIP):
            self._clip_flag.append(True)
        return out


def _validate(s: SpaceSpec):
    k = s.kind
    need_p = k not in (SpaceKind.SUP, SpaceKind.VARIABLE_LP, SpaceKind.ORLICZ)
    if need_p:
        if s.p is None or not math.isfinite(s.p):
            raise InvalidSpace(f"{k.value} needs a finite exponent p")
    if k is SpaceKind.LP and not s.p >= 1:
        raise InvalidSpace("Lp needs 1 <= p < inf")
    if k in (SpaceKind.WEIGHTED_LP, SpaceKind.GRAND_LP, SpaceKind.WEIGHTED_GRAND_LP, SpaceKind.WEAK_MP):
        if not s.p > 1:
            raise InvalidSpace(f"{k.value} needs 1 < p < inf")
    if k in (SpaceKind.MORREY, SpaceKind.WEIGHTED_MORREY):
        if s.p0 is None or not (1 < s.p <= s.p0 < math.inf):
            raise InvalidSpace("Morrey spaces need 1 < p <= p0 < inf")
    if k is SpaceKind.SMALL_MORREY:
        if not s.p >= 1:
            raise InvalidSpace("small Morrey needs 1 <= p < inf")
        if s.lam is None or not 0 < s.lam < 1:
            raise InvalidSpace("small Morrey needs 0 < lambda < 1")
    probes = np.linspace(s.domain[0], s.domain[1], _PROBES)
    if k in _WEIGHTED:
        if s.weight is None:
            raise InvalidSpace(f"{k.value} needs a weight")
        if s.weight.domain != s.domain:
            raise InvalidSpace("weight must live on the space's domain")
        w = s.weight._call(probes)
        if np.any(w < 0):
            raise InvalidSpace("weight must be nonnegative")
    if k is SpaceKind.VARIABLE_LP:
        if s.exponent_fn is None:
            raise InvalidSpace("variable-lp needs an exponent function")
        pv = s.exponent_fn(probes)
        if not (np.all(pv > 1) and np.all(np.isfinite(pv))):
            raise InvalidSpace("exponent function must satisfy 1 < p(t) < inf")
    if k is SpaceKind.ORLICZ:
        if s.young_phi is None:
            raise InvalidSpace("orlicz needs a Young function")
        check_young_function(s.young_phi)


def check_young_function(phi, upper: float = 10.0, n: int = 401):
    """Sampled check that ``phi`` is convex, nondecreasing, with ``phi(0) = 0``."""
    t = np.linspace(0.0, upper, n)
    v = np.asarray(phi(t), dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidSpace("Young function is not finite on the probe grid")
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(v[0]) > 1e-12 * scale:
        raise InvalidSpace("Young function must vanish at 0")
    if np.any(np.diff(v) < -1e-12 * scale):
        raise InvalidSpace("Young function must be nondecreasing")
    if np.any(np.diff(v, 2) < -1e-9 * scale):
        raise InvalidSpace("Young function must be convex")
    if v[-1] <= 0:
        raise InvalidSpace("Young function must not vanish identically")


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str
    est_error: float = 0.0
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "est_error", float(self.est_error))

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _absf(f: FunctionHandle):
    return lambda x: np.abs(f(x))


def _grid(space: SpaceSpec, n: Optional[int] = None):
    a, b = space.domain
    return np.linspace(a, b, (n or space.resolution) + 1)


def _is_zero(space: SpaceSpec, f: FunctionHandle) -> bool:
    return not np.any(f(_grid(space)))


def _weight_values(space: SpaceSpec, x):
    if space.weight is None:
        return 1.0
    return space.clipped_weight(x)


def _flags(space: SpaceSpec, converged: bool = True) -> tuple:
    out = []
    if space._clip_flag:
        out.append("weight-clipped")
        space._clip_flag.clear()
    if not converged:
        out.append("quadrature-unconverged")
    return tuple(out)


def _rule_for(space: SpaceSpec, f: FunctionHandle, exponents):
    """Node rule refined on ``sum_q |f|^q w`` for the given exponents."""
    exps = [float(q) for q in exponents]

    def integrand(x):
        af = np.abs(f(x))
        w = _weight_values(space, x)
        return sum(af**q for q in exps) * w

    a, b = space.domain
    return refined_rule(integrand, a, b, space.quadrature, f.breakpoints)


def _cell_integrals(space: SpaceSpec, integrand, n_cells: int, breakpoints=()):
    """Integrals of ``integrand`` over ``n_cells`` uniform cells of the domain."""
    a, b = space.domain
    edges = np.linspace(a, b, n_cells + 1)
    extra = np.asarray([t for t in breakpoints if a < t < b], dtype=float)
    if extra.size:
        fine = np.unique(np.concatenate([edges, extra]))
        res = integrate_cells(integrand, fine, space.quadrature)
        starts = np.searchsorted(fine, edges[:-1])
        return np.add.reduceat(res.values, starts), bool(np.all(res.converged))
    res = integrate_cells(integrand, edges, space.quadrature)
    return res.values, bool(np.all(res.converged))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _sup_at(space: SpaceSpec, f: FunctionHandle, n: int) -> float:
    a, b = space.domain
    x = np.linspace(a, b, n + 1)
    v = np.abs(f(x))
    best = float(v.max())
    h = (b - a) / n
    # polish the three largest interior local maxima
    interior = np.flatnonzero((v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:])) + 1
    for i in interior[np.argsort(v[interior])[::-1][:3]]:
        lo, hi = max(a, x[i] - h), min(b, x[i] + h)
        res = minimize_scalar(lambda t: -abs(f(t)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * (b - a)})
        best = max(best, -float(res.fun))
    return best


def _kernel_sup(space, f):
    n = space.resolution
    value = _sup_at(space, f, n)
    if f.lipschitz is not None:
        est = f.lipschitz * (space.domain[1] - space.domain[0]) / (2 * n)
    else:
        est = abs(value - _sup_at(space, f, max(n // 2, 1)))
    return NormResult(value, "sampled-max", est)


def _integral_norm(space, f, p):
    rule = _rule_for(space, f, [p])
    vals = np.abs(f(rule.nodes)) ** p * _weight_values(space, rule.nodes)
    integral = float(rule.integrate(vals))
    value = integral ** (1.0 / p)
    est = value * rule.error / (p * integral) if integral > 0 else 0.0
    return NormResult(value, "quadrature", est, _flags(space, rule.converged))


def _kernel_lp(space, f):
    return _integral_norm(space, f, space.p)


def _logistic_eps(p: float, count: int):
    u = np.linspace(-_EPS_SPREAD, _EPS_SPREAD, count)
    return (p - 1.0) / (1.0 + np.exp(-u))


def _grand_profile(absf, weights, w_vals, p, eps):
    """``(eps * int |f|^(p-eps) w)^(1/(p-eps))`` for an array of eps."""
    q = p - np.asarray(eps, dtype=float)
    with np.errstate(divide="ignore"):
        logf = np.log(absf)
    pos = absf > 0
    integ = np.exp(np.outer(q, logf[pos])) @ (weights[pos] * np.broadcast_to(w_vals, absf.shape)[pos])
    with np.errstate(divide="ignore"):
        return np.exp((np.log(eps) + np.log(integ)) / q)


def _grand_sup(absf, weights, w_vals, p, eps_grid):
    prof = _grand_profile(absf, weights, w_vals, p, eps_grid)
    # limit value at eps -> p - 1 (profile is continuous there)
    end = float(_grand_profile(absf, weights, w_vals, p, np.array([p - 1.0]))[0])
    k = int(np.argmax(prof))
    best = max(float(prof[k]), end)
    lo = eps_grid[k - 1] if k > 0 else eps_grid[0] * 1e-3
    hi = eps_grid[k + 1] if k + 1 < eps_grid.size else p - 1.0
    res = minimize_scalar(
        lambda e: -float(_grand_profile(absf, weights, w_vals, p, np.array([e]))[0]),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-14 * (p - 1.0)},
    )
    return max(best, -float(res.fun))


def _kernel_grand(space, f):
    p = space.p
    rule = _rule_for(space, f, [1.0, p])
    absf = np.abs(f(rule.nodes))
    w_vals = _weight_values(space, rule.nodes)
    eps = _logistic_eps(p, _EPS_NODES)
    value = _grand_sup(absf, rule.weights, w_vals, p, eps)
    coarse = _grand_sup(absf, rule.weights, w_vals, p, eps[::2])
    integral = float(rule.integrate(absf * w_vals))
    quad_rel = rule.error / integral if integral > 0 else 0.0
    est = abs(value - coarse) + value * quad_rel
    return NormResult(value, "grand-eps-sup", est, _flags(space, rule.converged))


def grand_profile(space: SpaceSpec, f: FunctionHandle, eps) -> np.ndarray:
    """The grand-norm objective at the given eps values (for refinement checks)."""
    rule = _rule_for(space, f, [1.0, space.p])
    absf = np.abs(f(rule.nodes))
    return _grand_profile(absf, rule.weights, _weight_values(space, rule.nodes), space.p, eps)


def _kernel_variable(space, f):
    pfn = space.exponent_fn
    probe = pfn(_grid(space))
    p_hi, p_lo = float(probe.max()), float(probe.min())
    rule = _rule_for(space, f, sorted({1.0, p_lo, p_hi}))
    absf = np.abs(f(rule.nodes))
    pv = pfn(rule.nodes)
    w = rule.weights

    def modular(lam):
        with np.errstate(over="ignore"):
            return float(((absf / lam) ** pv) @ w)

    lo = space.quadrature.abs_tol
    hi = float(absf.max()) + 1.0
    while modular(hi) > 1.0:
        hi *= 2.0
    while modular(lo) <= 1.0:
        lo *= 1e-3
    value = bisect(lambda lam: modular(lam) - 1.0, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=2000)
    total = float(absf @ w)
    quad_rel = rule.error / total if total > 0 else 0.0
    est = value * (quad_rel / p_lo + 1e-12)
    return NormResult(value, "luxemburg-bisection", est, _flags(space, rule.converged))


def _amemiya(absf, weights, phi, log_k):
    k = math.exp(log_k)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(phi(k * absf), dtype=float)
        total = float(vals @ weights)
    if not math.isfinite(total):
        return math.inf
    return (1.0 + total) / k


def _amemiya_inf(absf, weights, phi):
    grid = np.linspace(-40.0, 40.0, 161)
    vals = np.array([_amemiya(absf, weights, phi, s) for s in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda s: _amemiya(absf, weights, phi, s), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    return min(float(vals[i]), float(res.fun)), float(res.x)


def _kernel_orlicz(space, f):
    rule = _rule_for(space, f, [1.0, 2.0])
    absf = np.abs(f(rule.nodes))
    value, _ = _amemiya_inf(absf, rule.weights, space.young_phi)
    total = float(absf @ rule.weights)
    quad_rel = rule.error / total if total > 0 else 0.0
    # the Amemiya functional is the dual-form Orlicz norm only up to equivalence
    flags = ("amemiya-equivalence",) + _flags(space, rule.converged)
    return NormResult(value, "amemiya", value * quad_rel + 1e-13 * value, flags)


def _morrey_at(space, f, n):
    p, p0 = space.p, space.p0
    a, b = space.domain
    h = (b - a) / n

    def dens(x):
        return np.abs(f(x)) ** p * _weight_values(space, x)

    cells, converged = _cell_integrals(space, dens, n, f.breakpoints)
    prefix = np.concatenate([[0.0], np.cumsum(cells)])
    len_exp = 1.0 / p0 - 1.0 / p
    best, i, j = kernels.interval_power_sup(np.ascontiguousarray(prefix), h, len_exp, 1.0 / p)
    edges = a + h * np.arange(n + 1)

    def cumulative(x):
        # int_a^x dens, using the prefix up to the cell containing x
        k = min(int((x - a) / h), n - 1)
        part = _partial(dens, edges[k], x, space.quadrature)
        return prefix[k] + part

    def objective(lo_pt, hi_pt):
        if hi_pt - lo_pt <= 0:
            return 0.0
        mass = max(cumulative(hi_pt) - cumulative(lo_pt), 0.0)
        return (hi_pt - lo_pt) ** len_exp * mass ** (1.0 / p)

    lo_pt, hi_pt = edges[i], edges[j]
    for _ in range(2):
        lb, ub = max(a, lo_pt - h), min(hi_pt - 1e-3 * h, lo_pt + h)
        if ub > lb:
            r = minimize_scalar(lambda t: -objective(t, hi_pt), bounds=(lb, ub), method="bounded",
                                options={"xatol": 1e-10 * h})
            if -r.fun > objective(lo_pt, hi_pt):
                lo_pt = float(r.x)
        lb, ub = max(lo_pt + 1e-3 * h, hi_pt - h), min(b, hi_pt + h)
        if ub > lb:
            r = minimize_scalar(lambda t: -objective(lo_pt, t), bounds=(lb, ub), method="bounded",
                                options={"xatol": 1e-10 * h})
            if -r.fun > objective(lo_pt, hi_pt):
                hi_pt = float(r.x)
    return max(best, objective(lo_pt, hi_pt)), converged


def _partial(dens, lo, hi, cfg):
    if hi <= lo:
        return 0.0
    res = integrate_cells(dens, np.array([lo, hi]), cfg)
    return float(res.values[0])


def _kernel_morrey(space, f):
    n = space.resolution
    value, conv = _morrey_at(space, f, n)
    coarse, _ = _morrey_at(space, f, max(n // 2, 1))
    return NormResult(value, "interval-sup", abs(value - coarse), _flags(space, conv))


def rearranged_sup(values: np.ndarray, length: float, exponent: float) -> float:
    """``max_k (t_k)^(-exponent) * int_0^{t_k} v*`` over grid lengths ``t_k``.

    ``values`` must already be sorted in nonincreasing order.  For a
    piecewise constant function the supremum over ``t`` is attained at a
    grid point, so this is exact on the surrogate.
    """
    n = values.size
    h = length / n
    t = h * np.arange(1, n + 1)
    mass = np.cumsum(values) * h
    return float(np.max(t ** (-exponent) * mass))


def _set_sup_at(space, f, n):
    length = space.domain[1] - space.domain[0]
    star = decreasing_rearrangement(sample(f, n)).values
    if space.kind is SpaceKind.SMALL_MORREY:
        return rearranged_sup(star**space.p, length, space.lam) ** (1.0 / space.p)
    return rearranged_sup(star, length, 1.0 - 1.0 / space.p)


def _kernel_set_sup(space, f):
    n = space.resolution
    value = _set_sup_at(space, f, n)
    coarse = _set_sup_at(space, f, max(n // 2, 1))
    return NormResult(value, "rearrangement", abs(value - coarse))


_KERNELS = {
    SpaceKind.SUP: _kernel_sup,
    SpaceKind.LP: _kernel_lp,
    SpaceKind.WEIGHTED_LP: _kernel_lp,
    SpaceKind.GRAND_LP: _kernel_grand,
    SpaceKind.WEIGHTED_GRAND_LP: _kernel_grand,
    SpaceKind.VARIABLE_LP: _kernel_variable,
    SpaceKind.ORLICZ: _kernel_orlicz,
    SpaceKind.MORREY: _kernel_morrey,
    SpaceKind.WEIGHTED_MORREY: _kernel_morrey,
    SpaceKind.SMALL_MORREY: _kernel_set_sup,
    SpaceKind.WEAK_MP: _kernel_set_sup,
}


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def norm(space: SpaceSpec, f: FunctionHandle) -> NormResult:
    """Norm of ``|f|`` in ``space``."""
    if f.domain != space.domain:
        raise InvalidSpace(f"function domain {f.domain} does not match space domain {space.domain}")
    kernel = _KERNELS[space.kind]
    if _is_zero(space, f):
        return NormResult(0.0, kernel.__name__.removeprefix("_kernel_"), 0.0)
    return kernel(space, f)


def fundamental_constant(space: SpaceSpec) -> float:
    """``||1||_X``, the constant in ``||g||_X <= ||1||_X ||g||_inf``."""
    return norm(space, constant(1.0, space.domain)).value


def muckenhoupt_constant(w: FunctionHandle, p: float, resolution: int = 1024,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Largest ``avg_E(w) * avg_E(w^(-1/(p-1)))^(p-1)`` over grid intervals ``E``."""
    if not p > 1:
        raise InvalidSpace("the Muckenhoupt constant needs p > 1")
    a, b = w.domain
    edges = np.linspace(a, b, resolution + 1)
    dual_exp = -1.0 / (p - 1.0)

    def wv(x):
        return np.clip(w(x), 0.0, WEIGHT_CLIP)

    def dual(x):
        with np.errstate(divide="ignore"):
            return np.clip(np.clip(w(x), 0.0, None) ** dual_exp, 0.0, WEIGHT_CLIP)

    # interval averages divide by |E|, so cell integrals need an absolute
    # tolerance proportional to the cell width
    cell_cfg = replace(cfg, abs_tol=cfg.abs_tol * (b - a) / resolution)
    cw = integrate_cells(wv, edges, cell_cfg).values
    cd = integrate_cells(dual, edges, cell_cfg).values
    pw = np.ascontiguousarray(np.concatenate([[0.0], np.cumsum(cw)]))
    pd = np.ascontiguousarray(np.concatenate([[0.0], np.cumsum(cd)]))
    best, _, _ = kernels.muckenhoupt_sup(pw, pd, (b - a) / resolution, float(p))
    return float(best)


def shift_deviation(space: SpaceSpec, f: FunctionHandle, delta: float) -> NormResult:
    """``||T_delta f - f||_X`` with ``T_delta`` the zero-extended shift."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if space.domain != UNIT_INTERVAL:
        raise InvalidSpace("the shift deviation is defined for spaces over [0, 1]")
    cut = 1.0 - delta

    def g(x):
        x = np.asarray(x, dtype=float)
        shifted = np.where(x <= cut, f(np.minimum(x + delta, 1.0)), 0.0)
        return shifted - f(x)

    bps = (cut,) + f.breakpoints + tuple(t - delta for t in f.breakpoints)
    return norm(space, FunctionHandle(g, name=f"T[{f.name}]-{f.name}", breakpoints=bps))


def orlicz_dual_estimate(space: SpaceSpec, f: FunctionHandle) -> float:
    """Lower estimate of ``sup { int |f g| : int Psi(|g|) <= 1 }`` on samples.

    Candidates are scaled super-level indicators of ``|f|`` and scaled
    ``phi'(k|f|)`` profiles.  Used only to cross-check the Amemiya kernel.
    """
    if space.kind is not SpaceKind.ORLICZ:
        raise InvalidSpace("orlicz_dual_estimate needs an Orlicz space")
    phi = space.young_phi
    psi = space.young_psi or _conjugate(phi)
    n = space.resolution
    length = space.domain[1] - space.domain[0]
    h = length / n
    absf = np.abs(sample(f, n).values)
    best = 0.0

    star = np.sort(absf)[::-1]
    mass = np.cumsum(star) * h
    for k in range(1, n + 1, max(1, n // 256)):
        alpha = _invert_increasing(psi, 1.0 / (k * h))
        best = max(best, alpha * mass[k - 1])

    top = float(absf.max())
    for log_k in np.linspace(-12, 12, 97):
        kk = math.exp(log_k) / top
        d = 1e-7 * max(kk * top, 1.0)
        with np.errstate(over="ignore", invalid="ignore"):
            shape = (np.asarray(phi(kk * absf + d)) - np.asarray(phi(np.maximum(kk * absf - d, 0.0)))) / (
                (kk * absf + d) - np.maximum(kk * absf - d, 0.0))
        if not (np.all(np.isfinite(shape)) and np.any(shape > 0)):
            continue
        tau = _invert_increasing(lambda s: float(np.sum(psi(s * shape)) * h), 1.0)
        best = max(best, float(np.sum(absf * tau * shape) * h))
    return best


def _conjugate(phi):
    """Numerical complementary function ``Psi(u) = sup_t (u t - Phi(t))``.

    For convex ``Phi`` the supremum over the sample grid sits where the
    secant slope of ``Phi`` crosses ``u``, found by binary search.
    """
    t = np.concatenate([[0.0], np.logspace(-8, 8, 4001)])
    with np.errstate(over="ignore", invalid="ignore"):
        pt = np.asarray(phi(t), dtype=float)
    keep = np.isfinite(pt) & (pt < 1e300)
    t, pt = t[keep], pt[keep]
    slopes = np.maximum.accumulate(np.diff(pt) / np.diff(t))

    def psi(u):
        u = np.asarray(u, dtype=float)
        idx = np.minimum(np.searchsorted(slopes, u, side="left"), t.size - 1)
        return np.maximum(u * t[idx] - pt[idx], 0.0)

    return psi


def _invert_increasing(func, target):
    """Solve ``func(s) = target`` for nondecreasing ``func`` with ``func(0) = 0``."""
    hi = 1.0
    while float(func(hi)) < target:
        hi *= 2.0
        if hi > 1e300:
            return hi
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(func(mid)) < target:
            lo = mid
        else:
            hi = mid
    return lo
