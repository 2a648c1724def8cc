"""Positive linear operators: Kantorovich polynomials, Fejer means, custom rules."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .errors import DepthExceeded, InvalidOperator
from .funcspace import (
    DEFAULT_QUADRATURE,
    PERIODIC_INTERVAL,
    UNIT_INTERVAL,
    FunctionHandle,
    QuadratureConfig,
    adaptive_integrate,
    constant,
    integrate_cells,
)

# beyond this degree binomial weights are formed in log space
_LOG_SPACE_DEGREE = 60
# rows of the Bernstein matrix built at once
_CHUNK = 2048

PROBE_POINTS = 33


class OperatorKind(str, enum.Enum):
    KANTOROVICH = "kantorovich"
    FEJER = "fejer"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """One member ``L_n`` of an operator sequence.

    ``custom_apply(f, x)`` receives a :class:`FunctionHandle` and a scalar
    point and must return ``L_n(f)(x)``.  Custom rules are probed for
    positivity when the spec is built.
    """

    kind: OperatorKind
    n: int
    custom_apply: Optional[Callable[[FunctionHandle, float], float]] = None
    custom_is_unital: bool = False
    custom_domain: tuple = UNIT_INTERVAL
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise InvalidOperator(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.kind is OperatorKind.CUSTOM:
            if self.custom_apply is None:
                raise InvalidOperator("a custom operator needs custom_apply")
            _probe_positivity(self)
        elif self.custom_apply is not None:
            raise InvalidOperator("custom_apply is only allowed for custom operators")

    @classmethod
    def kantorovich(cls, n: int) -> "OperatorSpec":
        return cls(OperatorKind.KANTOROVICH, n)

    @classmethod
    def fejer(cls, n: int) -> "OperatorSpec":
        return cls(OperatorKind.FEJER, n)

    @classmethod
    def custom(cls, rule, n: int = 1, unital: bool = False, domain=UNIT_INTERVAL, name: str = "custom"):
        return cls(OperatorKind.CUSTOM, n, rule, unital, tuple(domain), name)

    def with_n(self, n: int) -> "OperatorSpec":
        return replace(self, n=n)

    @property
    def domain(self) -> tuple:
        if self.kind is OperatorKind.KANTOROVICH:
            return UNIT_INTERVAL
        if self.kind is OperatorKind.FEJER:
            return PERIODIC_INTERVAL
        return self.custom_domain

    @property
    def periodic(self) -> bool:
        return self.kind is OperatorKind.FEJER or (
            self.kind is OperatorKind.CUSTOM
            and math.isclose(self.custom_domain[1] - self.custom_domain[0], 2 * math.pi)
        )

    @property
    def is_unital(self) -> bool:
        if self.kind is OperatorKind.CUSTOM:
            return self.custom_is_unital
        return True

    @property
    def label(self) -> str:
        return self.name or f"{self.kind.value}({self.n})"


def _probe_positivity(op: OperatorSpec, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    a, b = op.custom_domain
    xs = np.linspace(a, b, PROBE_POINTS)
    probes = [constant(1.0, op.custom_domain)]
    probes.append(FunctionHandle(lambda t: t - a, domain=op.custom_domain, name="t-a"))
    probes.append(FunctionHandle(lambda t: b - t, domain=op.custom_domain, name="b-t"))
    for c in (a, 0.5 * (a + b), b):
        probes.append(FunctionHandle(lambda t, c=c: (t - c) ** 2, domain=op.custom_domain))
        probes.append(FunctionHandle(lambda t, c=c: np.abs(t - c), domain=op.custom_domain))
    floor = -10 * cfg.abs_tol
    for k, f in enumerate(probes):
        for x in xs:
            try:
                v = float(op.custom_apply(f, float(x)))
            except Exception:  # noqa: BLE001
                if k == 0:
                    # a rule that cannot act on constants is reported later, when L_n(1) is needed
                    break
                raise
            if not math.isfinite(v) or v < floor:
                raise InvalidOperator(
                    f"custom operator fails the positivity probe: L({f.name or 'f'})({x:.4g}) = {v!r}"
                )


# ---------------------------------------------------------------------------
# Kantorovich polynomials
# ---------------------------------------------------------------------------


def binomial_row(n: int) -> np.ndarray:
    """C(n, k) for k = 0..n by the multiplicative recurrence."""
    row = np.empty(n + 1)
    row[0] = 1.0
    for k in range(n):
        row[k + 1] = row[k] * (n - k) / (k + 1)
    return row


def bernstein_basis(n: int, x) -> np.ndarray:
    """Matrix ``B[i, k] = C(n, k) x_i^k (1 - x_i)^(n - k)``."""
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    k = np.arange(n + 1)
    if n <= _LOG_SPACE_DEGREE:
        return binomial_row(n) * x**k * (1.0 - x) ** (n - k)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    return np.exp(log_binom + xlogy(k, x) + xlog1py(n - k, -x))


def _check_unit_points(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)) or not np.all(np.isfinite(x)):
        raise ValueError("Kantorovich operators are evaluated at points of [0, 1]")
    return x


def _check_degree(n):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


@lru_cache(maxsize=256)
def kantorovich_cell_integrals(f: FunctionHandle, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """Integrals of ``f`` over the cells ``[k/(n+1), (k+1)/(n+1)]``.

    Cached per ``(f, n, cfg)``; the returned array is read-only.
    """
    n = _check_degree(n)
    edges = np.arange(n + 2) / (n + 1.0)
    res = integrate_cells(f, edges, cfg)
    if not np.all(res.converged):
        bad = int(np.flatnonzero(~res.converged)[0])
        raise DepthExceeded(float(res.values[bad]), float(res.errors[bad]),
                            f"cell integral {bad} of K_{n} did not converge")
    out = res.values.copy()
    out.setflags(write=False)
    return out


def bernstein_combine(n: int, coeffs: np.ndarray, x) -> np.ndarray:
    """``sum_k coeffs[k] * C(n,k) x^k (1-x)^(n-k)`` evaluated in row chunks."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size)
    for start in range(0, flat.size, _CHUNK):
        stop = start + _CHUNK
        out[start:stop] = bernstein_basis(n, flat[start:stop]) @ coeffs
    return out.reshape(x.shape)


def kantorovich_apply(f: FunctionHandle, n: int, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``K_n(f)(x) = (n+1) sum_k C(n,k) x^k (1-x)^(n-k) int_{k/(n+1)}^{(k+1)/(n+1)} f``."""
    n = _check_degree(n)
    if f.domain != UNIT_INTERVAL:
        raise ValueError("Kantorovich operators act on functions over [0, 1]")
    xa = _check_unit_points(x)
    cells = kantorovich_cell_integrals(f, n, cfg)
    out = bernstein_combine(n, (n + 1) * cells, xa)
    return float(out) if xa.ndim == 0 else out


def kantorovich_moment1(n: int, x):
    """``K_n(t)(x) = (2nx + 1) / (2(n+1))``."""
    n = _check_degree(n)
    x = _check_unit_points(x)
    return (2 * n * x + 1) / (2 * (n + 1))


def kantorovich_moment2(n: int, x):
    """``K_n(t^2)(x) = (3n(n-1)x^2 + 6nx + 1) / (3(n+1)^2)``."""
    n = _check_degree(n)
    x = _check_unit_points(x)
    return (3 * n * (n - 1) * x**2 + 6 * n * x + 1) / (3 * (n + 1) ** 2)


def kantorovich_second_central(n: int, x):
    """``K_n((x - t)^2)(x)``.

    Expanding ``x^2 - 2x K_n(t)(x) + K_n(t^2)(x)`` collapses to
    ``((n-1) x (1-x) + 1/3) / (n+1)^2``, which is what is evaluated.
    """
    n = _check_degree(n)
    x = _check_unit_points(x)
    return ((n - 1) * x * (1 - x) + 1.0 / 3.0) / (n + 1) ** 2


def kantorovich_second_central_expanded(n: int, x):
    """The unsimplified expansion, kept for cross-checking the closed form."""
    x = _check_unit_points(x)
    return x**2 - 2 * x * kantorovich_moment1(n, x) + kantorovich_moment2(n, x)


# ---------------------------------------------------------------------------
# Fejer means
# ---------------------------------------------------------------------------

_SERIES_RADIUS = 1e-6


def _wrap(u):
    return np.mod(np.asarray(u, dtype=float) + math.pi, 2 * math.pi) - math.pi


def fejer_kernel(u, n: int):
    """``F_n(u) = sin^2((n+1)u/2) / ((n+1) sin^2(u/2))``, unit mean on [-pi, pi]."""
    n = _check_degree(n)
    w = _wrap(u)
    m = n + 1
    near = np.abs(w) < _SERIES_RADIUS
    safe = np.where(near, 1.0, w)
    ratio = np.sin(0.5 * m * safe) / np.sin(0.5 * safe)
    # sin(m u/2)/sin(u/2) = m (1 - (m^2 - 1) u^2 / 24 + O(u^4))
    series = m * (1.0 - (m * m - 1.0) * w * w / 24.0)
    ratio = np.where(near, series, ratio)
    out = ratio * ratio / m
    return float(out) if np.ndim(out) == 0 else out


def fejer_transform(kernel_arg, n: int, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``(1/2pi) int_{-pi}^{pi} h(x, x - u) F_n(u) du`` for a bivariate ``h``.

    ``kernel_arg(x, t)`` is vectorised in both arguments and must be
    2*pi-periodic in ``t``.  Panels are split at the zeros of ``F_n`` so
    every panel integrand is smooth.
    """
    n = _check_degree(n)
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    m = n + 1
    k = np.arange(-m, m + 1)
    zeros = 2 * math.pi * k / m
    edges = np.unique(np.concatenate([[-math.pi, math.pi], zeros[np.abs(zeros) < math.pi]]))
    n_pan = edges.size - 1
    lo = np.tile(edges[:-1], flat.size)
    hi = np.tile(edges[1:], flat.size)
    owner = np.repeat(np.arange(flat.size), n_pan)

    def integrand(u, own):
        xs = flat[own]
        return kernel_arg(xs, xs - u) * fejer_kernel(u, n)

    res = adaptive_integrate(integrand, lo, hi, owner, flat.size, cfg)
    if not np.all(res.converged):
        bad = int(np.flatnonzero(~res.converged)[0])
        raise DepthExceeded(float(res.values[bad]), float(res.errors[bad]),
                            f"Fejer integral at x={flat[bad]:.6g} did not converge")
    out = (res.values / (2 * math.pi)).reshape(xa.shape)
    return float(out) if xa.ndim == 0 else out


def fejer_apply(f: FunctionHandle, n: int, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Fejer mean ``sigma_n(f)(x)`` of a 2*pi-periodic ``f``."""
    if not f.periodic:
        raise ValueError("Fejer means act on periodic functions")
    return fejer_transform(lambda _x, t: f.periodic_eval(t), n, x, cfg)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def apply(op: OperatorSpec, f: FunctionHandle, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``L_n(f)(x)`` for any supported operator; ``x`` may be an array."""
    if op.kind is OperatorKind.KANTOROVICH:
        return kantorovich_apply(f, op.n, x, cfg)
    if op.kind is OperatorKind.FEJER:
        return fejer_apply(f, op.n, x, cfg)
    xa = np.asarray(x, dtype=float)
    a, b = op.custom_domain
    if np.any((xa < a - 1e-12) | (xa > b + 1e-12)):
        raise ValueError(f"points outside the operator domain {op.custom_domain}")
    out = np.array([float(op.custom_apply(f, float(t))) for t in xa.ravel()]).reshape(xa.shape)
    return float(out) if xa.ndim == 0 else out


def image(op: OperatorSpec, f: FunctionHandle, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> FunctionHandle:
    """``L_n(f)`` as a function handle on the operator's domain."""
    return FunctionHandle(
        lambda x: apply(op, f, x, cfg),
        domain=op.domain,
        periodic=op.periodic,
        name=f"{op.label}[{f.name}]",
    )
