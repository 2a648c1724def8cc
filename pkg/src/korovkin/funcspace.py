"""Function handles, uniform-grid sampling, adaptive quadrature and rearrangement.

Everything else in the package is built on the three primitives here:

* :class:`FunctionHandle` wraps a vectorised real function on a closed interval,
* :func:`integrate` / :func:`integrate_cells` run composite Gauss-Legendre
  panels with adaptive halving,
* :func:`sample` and :func:`decreasing_rearrangement` give the piecewise
  constant surrogate used by set-supremum norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DepthExceeded, InvalidFunction, NonFiniteEvaluation

UNIT_INTERVAL = (0.0, 1.0)
PERIODIC_INTERVAL = (-math.pi, math.pi)


# ---------------------------------------------------------------------------
# Function handles
# ---------------------------------------------------------------------------


def _vectorised(func: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Return a callable that maps float arrays to float arrays of equal shape.

    Callables written with numpy ufuncs pass straight through; constant
    returns are broadcast; scalar-only callables (``math.sqrt``) fall back
    to ``np.vectorize``.
    """
    scalar_fallback = np.vectorize(lambda t: float(func(float(t))), otypes=[float])

    def call(x: np.ndarray) -> np.ndarray:
        try:
            out = func(x)
        except (TypeError, ValueError):
            return scalar_fallback(x)
        out = np.asarray(out, dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape)
        return out

    return call


@dataclass(frozen=True, eq=False)
class FunctionHandle:
    """A real function on a closed interval.

    ``func`` should accept numpy arrays; scalar-only callables work but are
    slow.  Instances compare and hash by identity so they can key caches.

    Parameters
    ----------
    func : callable
        Evaluation rule.
    domain : (float, float)
        Closed interval, ``[0, 1]`` for the algebraic setting and
        ``[-pi, pi]`` for periodic functions.
    derivative : FunctionHandle or callable, optional
        Derivative of ``func`` (same domain).
    lipschitz : float, optional
        A Lipschitz constant, used for sampling error bars.
    periodic : bool
        Marks a 2*pi-periodic function given on ``[-pi, pi]``.
    name : str
        Label used in reports.
    breakpoints : tuple of float
        Interior points where ``func`` may have a kink or jump; quadrature
        starts a fresh panel at each.
    """

    func: Callable
    domain: tuple = UNIT_INTERVAL
    derivative: Optional["FunctionHandle"] = None
    lipschitz: Optional[float] = None
    periodic: bool = False
    name: str = ""
    breakpoints: tuple = ()
    _call: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = (float(v) for v in self.domain)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise InvalidFunction(f"domain must be a finite interval a < b, got {self.domain}")
        object.__setattr__(self, "domain", (a, b))
        object.__setattr__(
            self, "breakpoints", tuple(sorted(float(t) for t in self.breakpoints if a < float(t) < b))
        )
        if self.periodic and not math.isclose(b - a, 2 * math.pi, rel_tol=1e-12):
            raise InvalidFunction("periodic functions must be given on an interval of length 2*pi")
        if self.lipschitz is not None and self.lipschitz < 0:
            raise InvalidFunction("lipschitz constant must be nonnegative")
        deriv = self.derivative
        if deriv is not None and not isinstance(deriv, FunctionHandle):
            deriv = FunctionHandle(
                deriv, domain=(a, b), periodic=self.periodic, name=f"{self.name}'"
            )
            object.__setattr__(self, "derivative", deriv)
        object.__setattr__(self, "_call", _vectorised(self.func))

    @property
    def a(self) -> float:
        return self.domain[0]

    @property
    def b(self) -> float:
        return self.domain[1]

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    def __call__(self, x):
        """Evaluate at ``x`` (scalar or array), rejecting non-finite output."""
        arr = np.asarray(x, dtype=float)
        out = self._call(arr)
        if not np.all(np.isfinite(out)):
            bad = arr[~np.isfinite(out)] if arr.ndim else arr
            raise NonFiniteEvaluation(
                f"{self.name or 'function'} is not finite at {np.ravel(bad)[:5]}", bad
            )
        if arr.ndim == 0:
            return float(out)
        return np.array(out, dtype=float, copy=True)

    def periodic_eval(self, x):
        """Evaluate the 2*pi-periodic extension at arbitrary real ``x``."""
        a = self.a
        return self(np.mod(np.asarray(x, dtype=float) - a, self.length) + a)

    # Arithmetic keeps the domain and periodicity of the left operand.

    def _combine(self, other, op, name):
        if isinstance(other, FunctionHandle):
            if other.domain != self.domain:
                raise InvalidFunction("cannot combine functions on different domains")
            g = other
            rule = lambda x: op(self._call(x), g._call(x))  # noqa: E731
            periodic = self.periodic and other.periodic
            bps = self.breakpoints + other.breakpoints
        else:
            c = float(other)
            rule = lambda x: op(self._call(x), c)  # noqa: E731
            periodic = self.periodic
            bps = self.breakpoints
        return FunctionHandle(rule, domain=self.domain, periodic=periodic, name=name, breakpoints=bps)

    def __add__(self, other):
        return self._combine(other, np.add, f"({self.name}+{_label(other)})")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract, f"({self.name}-{_label(other)})")

    def __mul__(self, other):
        if isinstance(other, FunctionHandle):
            return self._combine(other, np.multiply, f"({self.name}*{other.name})")
        c = float(other)
        deriv = None if self.derivative is None else self.derivative * c
        lip = None if self.lipschitz is None else abs(c) * self.lipschitz
        return FunctionHandle(
            lambda x: c * self._call(x),
            domain=self.domain,
            derivative=deriv,
            lipschitz=lip,
            periodic=self.periodic,
            name=f"{c:g}*{self.name}",
            breakpoints=self.breakpoints,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __abs__(self):
        return FunctionHandle(
            lambda x: np.abs(self._call(x)),
            domain=self.domain,
            lipschitz=self.lipschitz,
            periodic=self.periodic,
            name=f"|{self.name}|",
            breakpoints=self.breakpoints,
        )

    def validate(self, grid_size: int = 257, deriv_tol: float = 1e-5, periodic_tol: float = 1e-10):
        """Check the sampled invariants; raise :class:`InvalidFunction` on failure."""
        x = np.linspace(self.a, self.b, grid_size)
        values = self(x)
        if self.derivative is not None:
            h = 1e-5 * self.length
            xi = x[1:-1]
            fd = (self(xi + h) - self(xi - h)) / (2 * h)
            d = self.derivative(xi)
            scale = max(1.0, float(np.max(np.abs(d))))
            worst = float(np.max(np.abs(fd - d)))
            if worst > deriv_tol * scale:
                raise InvalidFunction(
                    f"derivative of {self.name or 'function'} disagrees with finite differences "
                    f"by {worst:.3g}"
                )
        if self.periodic and abs(values[0] - values[-1]) > periodic_tol * max(1.0, abs(values[0])):
            raise InvalidFunction(f"{self.name or 'function'} is not periodic: f(a) != f(b)")
        return self


def _label(other):
    return other.name if isinstance(other, FunctionHandle) else f"{float(other):g}"


def constant(c: float, domain=UNIT_INTERVAL, periodic: bool = False) -> FunctionHandle:
    c = float(c)
    return FunctionHandle(
        lambda x: np.full(np.shape(x), c),
        domain=domain,
        derivative=FunctionHandle(lambda x: np.zeros(np.shape(x)), domain=domain, periodic=periodic),
        lipschitz=0.0,
        periodic=periodic,
        name=f"{c:g}",
    )


# ---------------------------------------------------------------------------
# Sampling and rearrangement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampledFunction:
    """Midpoint samples of a function on ``grid_size`` uniform cells."""

    values: np.ndarray
    domain: tuple = UNIT_INTERVAL

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise InvalidFunction("a sampled function needs at least one cell")
        if not np.all(np.isfinite(values)):
            raise NonFiniteEvaluation("sampled values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def grid_size(self) -> int:
        return self.values.size

    @property
    def cell_width(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.grid_size

    def midpoints(self) -> np.ndarray:
        return cell_midpoints(self.domain, self.grid_size)


def cell_midpoints(domain, grid_size: int) -> np.ndarray:
    a, b = domain
    return a + (np.arange(grid_size) + 0.5) * ((b - a) / grid_size)


def sample(f: FunctionHandle, grid_size: int) -> SampledFunction:
    """Values of ``f`` at the midpoints of ``grid_size`` uniform cells."""
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    return SampledFunction(f(cell_midpoints(f.domain, grid_size)), domain=f.domain)


def decreasing_rearrangement(s: SampledFunction) -> SampledFunction:
    """Nonincreasing rearrangement of ``|s|`` on the same grid."""
    return SampledFunction(np.sort(np.abs(s.values))[::-1], domain=s.domain)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

GL_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 30

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    """Per-owner results of a batched adaptive integration.

    ``panels`` holds the accepted ``(lo, hi, owner)`` triples so that a
    caller can reuse the refined node set for related integrands.
    """

    values: np.ndarray
    errors: np.ndarray
    converged: np.ndarray
    panels: tuple


def _gl_nodes(lo: np.ndarray, hi: np.ndarray):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return mid[:, None] + half[:, None] * _GL_NODES[None, :], half


def _evaluate(integrand, t, owner):
    vals = np.asarray(integrand(t, owner), dtype=float)
    if vals.shape != t.shape:
        vals = np.broadcast_to(vals, t.shape)
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)]
        raise NonFiniteEvaluation(f"integrand is not finite at {bad[:5]}", bad)
    return vals


def adaptive_integrate(integrand, lo, hi, owner, n_owners: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Integrate a family of integrands over unions of initial panels.

    Parameters
    ----------
    integrand : callable ``(t, owner) -> values``
        ``t`` is a 2-D node array and ``owner`` a matching-shape integer array
        naming which integral each node belongs to.
    lo, hi, owner : array_like
        Initial panels; panel ``k`` contributes to integral ``owner[k]``.
    n_owners : int
        Number of separate integrals.

    Panels are refined by halving.  An integral stops refining as soon as
    the sum of its panel error estimates is within
    ``max(abs_tol, rel_tol * |value|)``; otherwise panels failing a
    width-proportional share of that tolerance are split, up to
    ``max_depth`` halvings.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    owner = np.asarray(owner, dtype=np.intp).ravel()
    depth = np.zeros(lo.size, dtype=np.intp)
    width_total = np.bincount(owner, weights=hi - lo, minlength=n_owners)
    width_total[width_total == 0] = 1.0

    t, half = _gl_nodes(lo, hi)
    coarse = half * (_evaluate(integrand, t, np.broadcast_to(owner[:, None], t.shape)) @ _GL_WEIGHTS)

    acc_val = np.zeros(n_owners)
    acc_err = np.zeros(n_owners)
    acc_lo, acc_hi, acc_owner = [], [], []
    failed = np.zeros(n_owners, dtype=bool)

    while lo.size:
        mid = 0.5 * (lo + hi)
        both_lo = np.concatenate([lo, mid])
        both_hi = np.concatenate([mid, hi])
        both_owner = np.concatenate([owner, owner])
        t, half = _gl_nodes(both_lo, both_hi)
        parts = half * (_evaluate(integrand, t, np.broadcast_to(both_owner[:, None], t.shape)) @ _GL_WEIGHTS)
        left, right = parts[: lo.size], parts[lo.size:]
        fine = left + right
        err = np.abs(fine - coarse)

        val_est = acc_val + np.bincount(owner, weights=fine, minlength=n_owners)
        err_est = acc_err + np.bincount(owner, weights=err, minlength=n_owners)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(val_est))
        owner_done = err_est <= tol

        local_ok = err <= tol[owner] * (hi - lo) / width_total[owner]
        at_limit = depth >= cfg.max_depth
        accept = owner_done[owner] | local_ok | at_limit
        failed_here = at_limit & ~local_ok & ~owner_done[owner]
        if failed_here.any():
            failed[owner[failed_here]] = True

        if accept.any():
            acc_val += np.bincount(owner[accept], weights=fine[accept], minlength=n_owners)
            acc_err += np.bincount(owner[accept], weights=err[accept], minlength=n_owners)
            acc_lo.append(lo[accept])
            acc_hi.append(hi[accept])
            acc_owner.append(owner[accept])

        split = ~accept
        lo = np.concatenate([lo[split], mid[split]])
        hi = np.concatenate([mid[split], hi[split]])
        owner = np.concatenate([owner[split], owner[split]])
        depth = np.concatenate([depth[split], depth[split]]) + 1
        coarse = np.concatenate([left[split], right[split]])

    tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(acc_val))
    converged = ~failed | (acc_err <= tol)
    panels = (
        np.concatenate(acc_lo) if acc_lo else np.empty(0),
        np.concatenate(acc_hi) if acc_hi else np.empty(0),
        np.concatenate(acc_owner) if acc_owner else np.empty(0, dtype=np.intp),
    )
    return QuadratureResult(acc_val, acc_err, converged, panels)


def _initial_panels(a: float, b: float, breakpoints: Sequence[float]):
    pts = [a, b] + [float(p) for p in breakpoints if a < float(p) < b]
    pts = np.unique(pts)
    return pts[:-1], pts[1:]


def integrate(
    f,
    a: float,
    b: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integral of ``f`` over ``[a, b]``.

    ``f`` may be a :class:`FunctionHandle` or any vectorised callable.
    ``breakpoints`` inside ``(a, b)`` start the refinement from separate
    panels, which matters for integrands that are only piecewise smooth.

    Raises
    ------
    NonFiniteEvaluation
        If ``f`` is not finite at a quadrature node.
    DepthExceeded
        If ``cfg.max_depth`` halvings did not meet the tolerance; the
        exception carries the best estimate.
    """
    if a > b:
        raise ValueError("integration limits must satisfy a <= b")
    if isinstance(f, FunctionHandle) and (a < f.a - 1e-12 or b > f.b + 1e-12):
        raise ValueError(f"[{a}, {b}] is not inside the domain {f.domain}")
    if a == b:
        return 0.0
    lo, hi = _initial_panels(a, b, breakpoints)
    res = adaptive_integrate(lambda t, _o: f(t), lo, hi, np.zeros(lo.size, np.intp), 1, cfg)
    if res.converged[0]:
        return float(res.values[0])
    # retry panel by panel with the endpoint-flattening substitution
    cells = integrate_cells(f, np.concatenate([lo, hi[-1:]]), cfg)
    total = float(np.sum(cells.values))
    err = float(np.sum(cells.errors))
    if err <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        return total
    raise DepthExceeded(total, err)


def integrate_cells(f, edges, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """Integrals of ``f`` over consecutive cells ``[edges[k], edges[k+1]]``.

    Every cell is its own integral with its own tolerance; non-converged
    cells are flagged in the result instead of raising.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    res = adaptive_integrate(lambda t, _o: f(t), lo, hi, np.arange(lo.size), lo.size, cfg)
    if np.all(res.converged):
        return res
    bad = np.flatnonzero(~res.converged)
    retry = _smoothstep_cells(f, lo[bad], hi[bad], cfg)
    better = retry.errors < res.errors[bad]
    values, errors, converged = res.values.copy(), res.errors.copy(), res.converged.copy()
    idx = bad[better]
    values[idx] = retry.values[better]
    errors[idx] = retry.errors[better]
    converged[idx] = retry.converged[better]
    return QuadratureResult(values, errors, converged, res.panels)


def _smoothstep_cells(f, lo, hi, cfg):
    """Cell integrals after ``t = lo + (hi - lo) s^2 (3 - 2s)``.

    The substitution has vanishing derivative at both cell ends, which
    turns integrable endpoint singularities such as ``t^(-1/2)`` into
    smooth integrands.
    """
    width = hi - lo

    def integrand(s, own):
        phi = s * s * (3.0 - 2.0 * s)
        dphi = 6.0 * s * (1.0 - s)
        w = width[own]
        return f(lo[own] + w * phi) * (w * dphi)

    n = lo.size
    return adaptive_integrate(integrand, np.zeros(n), np.ones(n), np.arange(n), n, cfg)


@dataclass(frozen=True)
class NodeRule:
    """A fixed composite quadrature rule: ``sum(weights * g(nodes))``.

    Built once from the adaptively refined panels of one integrand and
    then reused for integrands of similar shape (e.g. ``|f|**q`` for a
    range of ``q``).
    """

    nodes: np.ndarray
    weights: np.ndarray
    error: float
    converged: bool

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return values @ self.weights


def refined_rule(
    integrand,
    a: float,
    b: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    breakpoints: Sequence[float] = (),
) -> NodeRule:
    """Adaptively refine panels for ``integrand`` and return the fine rule."""
    lo, hi = _initial_panels(a, b, breakpoints)
    res = adaptive_integrate(lambda t, _o: integrand(t), lo, hi, np.zeros(lo.size, np.intp), 1, cfg)
    plo, phi, _ = res.panels
    order = np.argsort(plo)
    plo, phi = plo[order], phi[order]
    mid = 0.5 * (plo + phi)
    halves_lo = np.concatenate([plo, mid])
    halves_hi = np.concatenate([mid, phi])
    nodes, half = _gl_nodes(halves_lo, halves_hi)
    weights = half[:, None] * _GL_WEIGHTS[None, :]
    nodes, weights = nodes.ravel(), weights.ravel()
    order = np.argsort(nodes, kind="stable")
    return NodeRule(nodes[order], weights[order], float(res.errors[0]), bool(res.converged[0]))
