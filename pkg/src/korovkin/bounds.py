"""Both sides of the quantitative Korovkin inequalities.

For a positive operator ``L_n``, a function ``f`` and a function space
``X`` with ``c = ||L_n 1||_X``:

* modulus form::

    ||L_n f - f||_X <= ||f||_inf ||L_n 1 - 1||_X + (c + 1) omega(f, mu_n)

* derivative form (``f`` continuously differentiable)::

    ||L_n f - f||_X <= ||f||_inf ||L_n 1 - 1||_X + sqrt(c) mu_n ||f'||_inf
                       + (sqrt(c) + 1) mu_n omega(f', mu_n)

with ``mu_n^2 = ||L_n((x - .)^2)(x)||_X`` on ``[0, 1]`` and
``mu_n^2 = pi^2 ||L_n(sin^2((x - .)/2))(x)||_X`` for periodic operators.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MissingDerivative, NonUnitalWithoutOne, NotPeriodic
from .funcspace import DEFAULT_QUADRATURE, FunctionHandle, QuadratureConfig, constant
from .modulus import modulus_of_continuity
from .norms import NormResult, SpaceSpec, norm
from .operators import (
    OperatorKind,
    OperatorSpec,
    apply,
    fejer_transform,
    image,
    kantorovich_second_central,
)


ROUNDOFF_FACTOR = 8.0
# log-residuals below this are rounding noise, never grounds for exclusion
EXCLUSION_FLOOR = 1e-9


class Flavor(str, enum.Enum):
    SHISHA_MOND = "shisha-mond"
    DEVORE = "devore"
    TRIG_SHISHA_MOND = "trig-shisha-mond"
    TRIG_DEVORE = "trig-devore"

    @property
    def uses_derivative(self) -> bool:
        return self in (Flavor.DEVORE, Flavor.TRIG_DEVORE)

    @property
    def trigonometric(self) -> bool:
        return self in (Flavor.TRIG_SHISHA_MOND, Flavor.TRIG_DEVORE)


@dataclass(frozen=True)
class BoundReport:
    n: int
    space: str
    flavor: str
    lhs: float
    mu_n: float
    omega_val: float
    term_unital: float
    term_main: float
    rhs: float
    holds: bool
    ratio: float
    term_drift: float = 0.0
    c: float = 1.0
    function: str = ""
    lhs_error: float = 0.0
    rhs_error: float = 0.0
    strict_holds: bool = True
    flags: tuple = ()

    @property
    def est_error(self) -> float:
        return self.lhs_error + self.rhs_error

    def as_dict(self) -> dict:
        d = asdict(self)
        d["est_error"] = self.est_error
        d["flags"] = list(self.flags)
        return d


@dataclass(frozen=True)
class RateReport:
    n_values: list
    lhs_values: list
    rhs_values: list
    mu_values: list
    slope_lhs: float
    slope_rhs: float
    residual_lhs: float
    residual_rhs: float
    slopes_defined: bool = True
    excluded_first_lhs: bool = False
    excluded_first_rhs: bool = False
    reports: list = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.reports)


# ---------------------------------------------------------------------------
# mu_n
# ---------------------------------------------------------------------------


def second_moment_function(op: OperatorSpec, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> FunctionHandle:
    """``x -> L_n((x - .)^2)(x)``, or ``L_n(sin^2((x - .)/2))(x)`` for periodic operators."""
    n = op.n
    if op.kind is OperatorKind.KANTOROVICH:
        return FunctionHandle(
            lambda x: kantorovich_second_central(n, x),
            lipschitz=(n - 1) / (n + 1) ** 2,
            name=f"K{n}[(x-t)^2]",
        )
    if op.kind is OperatorKind.FEJER:
        return FunctionHandle(
            lambda x: fejer_transform(lambda xs, t: np.sin(0.5 * (xs - t)) ** 2, n, x, cfg),
            domain=op.domain,
            periodic=True,
            name=f"F{n}[sin^2]",
        )
    if op.periodic:
        kernel = lambda x: lambda t: np.sin(0.5 * (x - t)) ** 2  # noqa: E731
    else:
        kernel = lambda x: lambda t: (x - t) ** 2  # noqa: E731

    def moment(x):
        xa = np.asarray(x, dtype=float)
        vals = [
            apply(op, FunctionHandle(kernel(float(t)), domain=op.domain, periodic=op.periodic), float(t), cfg)
            for t in xa.ravel()
        ]
        return np.array(vals).reshape(xa.shape)

    return FunctionHandle(moment, domain=op.domain, periodic=op.periodic, name=f"{op.label}[moment]")


def _mu_with_error(space: SpaceSpec, op: OperatorSpec, cfg: QuadratureConfig):
    g = second_moment_function(op, cfg)
    res = norm(space, g)
    scale = math.pi if op.periodic else 1.0
    mu = scale * math.sqrt(res.value)
    err = scale * res.est_error / (2 * math.sqrt(res.value)) if res.value > 0 else 0.0
    return mu, err, res


def mu_n(space: SpaceSpec, op: OperatorSpec, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """The argument ``mu_n`` fed to the modulus of continuity."""
    if space.domain != op.domain:
        raise ValueError(f"space domain {space.domain} differs from operator domain {op.domain}")
    return _mu_with_error(space, op, cfg)[0]


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _unital_terms(space, op, f_sup, f_sup_err, cfg, unital_shortcut):
    """``(c, c_err, term_unital, term_unital_err)``."""
    one = constant(1.0, op.domain, periodic=op.periodic)
    if op.is_unital and unital_shortcut:
        c_res = norm(space, one)
        return c_res.value, c_res.est_error, 0.0, 0.0
    try:
        l_one = image(op, one, cfg)
        l_one(np.linspace(op.domain[0], op.domain[1], 3))
    except Exception as exc:  # noqa: BLE001 - any failure of the rule
        raise NonUnitalWithoutOne(f"cannot evaluate {op.label}(1): {exc}") from exc
    c_res = norm(space, l_one)
    dev = norm(space, l_one - one)
    term = f_sup * dev.value
    term_err = f_sup * dev.est_error + f_sup_err * dev.value
    return c_res.value, c_res.est_error, term, term_err


def _sup_space(space: SpaceSpec) -> SpaceSpec:
    return SpaceSpec.sup(domain=space.domain, resolution=max(space.resolution, 1024), quadrature=space.quadrature)


def _assemble(space, op, f, flavor: Flavor, cfg, unital_shortcut, modulus_resolution):
    if space.domain != op.domain or f.domain != op.domain:
        raise ValueError("space, operator and function must share a domain")
    flags = []
    sup = _sup_space(space)
    f_sup_res = norm(sup, f)
    f_sup, f_sup_err = f_sup_res.value, f_sup_res.est_error

    err_fn = image(op, f, cfg) - f
    lhs_res: NormResult = norm(space, err_fn)
    flags.extend(lhs_res.flags)

    c, c_err, term_unital, unital_err = _unital_terms(space, op, f_sup, f_sup_err, cfg, unital_shortcut)
    # floating-point floor of evaluating L_n f: the weights sum to 1 only up to O(n eps)
    roundoff = ROUNDOFF_FACTOR * (op.n + 1) * np.finfo(float).eps * f_sup * max(c, 1.0)
    mu, mu_err, mu_res = _mu_with_error(space, op, cfg)
    flags.extend(mu_res.flags)

    if flavor.uses_derivative:
        fp = f.derivative
        fp_sup_res = norm(sup, fp)
        if mu > 0:
            om = modulus_of_continuity(fp, mu, modulus_resolution)
            omega, omega_err = om.value, om.error
        else:
            omega, omega_err = 0.0, 0.0
        root_c = math.sqrt(c)
        term_drift = root_c * mu * fp_sup_res.value
        term_main = (root_c + 1.0) * mu * omega
        d_root_c = c_err / (2 * root_c) if root_c > 0 else 0.0
        rhs_err = (
            unital_err
            + root_c * mu * fp_sup_res.est_error
            + (root_c + 1.0) * mu * omega_err
            + d_root_c * mu * (fp_sup_res.value + omega)
            + mu_err * (root_c * fp_sup_res.value + (root_c + 1.0) * omega)
        )
    else:
        if mu > 0:
            om = modulus_of_continuity(f, mu, modulus_resolution)
            omega, omega_err = om.value, om.error
        else:
            omega, omega_err = 0.0, 0.0
        term_drift = 0.0
        term_main = (c + 1.0) * omega
        rhs_err = unital_err + (c + 1.0) * omega_err + c_err * omega

    rhs = term_unital + term_drift + term_main
    lhs = lhs_res.value
    lhs_err = lhs_res.est_error + roundoff
    holds = lhs <= rhs + lhs_err + rhs_err
    if rhs > 0:
        ratio = lhs / rhs
    else:
        # both sides vanish up to rounding
        ratio = 0.0 if lhs <= lhs_err else math.inf
    return BoundReport(
        n=op.n,
        space=space.label,
        flavor=flavor.value,
        lhs=lhs,
        mu_n=mu,
        omega_val=omega,
        term_unital=term_unital,
        term_main=term_main,
        rhs=rhs,
        holds=bool(holds),
        ratio=ratio,
        term_drift=term_drift,
        c=c,
        function=f.name,
        lhs_error=lhs_err,
        rhs_error=rhs_err,
        strict_holds=bool(lhs <= rhs),
        flags=tuple(dict.fromkeys(flags)),
    )


def shisha_mond_bound(
    space: SpaceSpec,
    op: OperatorSpec,
    f: FunctionHandle,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    unital_shortcut: bool = True,
    modulus_resolution: int = 1024,
) -> BoundReport:
    """Modulus form of the bound for ``f`` continuous on ``[0, 1]``.

    With ``unital_shortcut`` a unital operator skips evaluating
    ``L_n 1`` and uses ``c = ||1||_X`` with a zero unital term.
    """
    if op.periodic:
        raise ValueError("use trig_bound for periodic operators")
    return _assemble(space, op, f, Flavor.SHISHA_MOND, cfg, unital_shortcut, modulus_resolution)


def devore_bound(
    space: SpaceSpec,
    op: OperatorSpec,
    f: FunctionHandle,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    unital_shortcut: bool = True,
    modulus_resolution: int = 1024,
) -> BoundReport:
    """Derivative form of the bound; ``f.derivative`` is required."""
    if f.derivative is None:
        raise MissingDerivative(f"{f.name or 'function'} has no derivative")
    if op.periodic:
        raise ValueError("use trig_bound for periodic operators")
    return _assemble(space, op, f, Flavor.DEVORE, cfg, unital_shortcut, modulus_resolution)


def trig_bound(
    space: SpaceSpec,
    op: OperatorSpec,
    f: FunctionHandle,
    flavor="shisha-mond",
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    unital_shortcut: bool = True,
    modulus_resolution: int = 1024,
) -> BoundReport:
    """Periodic version of either bound; ``omega`` is taken on the circle."""
    flavor = Flavor(flavor)
    if not flavor.trigonometric:
        flavor = Flavor.TRIG_DEVORE if flavor.uses_derivative else Flavor.TRIG_SHISHA_MOND
    if not f.periodic:
        raise NotPeriodic(f"{f.name or 'function'} is not marked periodic")
    if flavor.uses_derivative:
        if f.derivative is None:
            raise MissingDerivative(f"{f.name or 'function'} has no derivative")
        if not f.derivative.periodic:
            raise NotPeriodic("the derivative must be periodic")
    if not op.periodic:
        raise ValueError("trig_bound needs a periodic operator")
    return _assemble(space, op, f, flavor, cfg, unital_shortcut, modulus_resolution)


def bound(space, op, f, flavor, **kw) -> BoundReport:
    """Dispatch on ``flavor``."""
    flavor = Flavor(flavor)
    if flavor.trigonometric:
        return trig_bound(space, op, f, flavor, **kw)
    if flavor is Flavor.DEVORE:
        return devore_bound(space, op, f, **kw)
    return shisha_mond_bound(space, op, f, **kw)


# ---------------------------------------------------------------------------
# rate sweeps
# ---------------------------------------------------------------------------


def fit_log_slope(n_values: Sequence[int], values: Sequence[float]):
    """Least-squares slope of ``log(value)`` against ``log(n + 1)``.

    Returns ``(slope, rms_residual, excluded_first)``.  The smallest ``n``
    is dropped when its residual against the fit of the remaining points
    exceeds three times that fit's RMS residual (pre-asymptotic
    contamination).  Non-positive values give a NaN slope.
    """
    v = np.asarray(values, dtype=float)
    if np.any(~(v > 0)):
        return math.nan, math.nan, False
    x = np.log(np.asarray(n_values, dtype=float) + 1.0)
    y = np.log(v)
    if x.size > 3:
        rest = np.polyfit(x[1:], y[1:], 1)
        rest_resid = y[1:] - np.polyval(rest, x[1:])
        rest_rms = float(np.sqrt(np.mean(rest_resid**2)))
        first = abs(float(y[0] - np.polyval(rest, x[0])))
        if first > max(3.0 * rest_rms, EXCLUSION_FLOOR):
            return float(rest[0]), rest_rms, True
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return float(coef[0]), float(np.sqrt(np.mean(resid**2))), False


def rate_sweep(
    space: SpaceSpec,
    op_family: OperatorSpec,
    f: FunctionHandle,
    n_values: Sequence[int],
    flavor="shisha-mond",
    **kw,
) -> RateReport:
    """Run the chosen bound for every ``n`` and fit log-log slopes."""
    n_values = [int(n) for n in n_values]
    if len(n_values) < 4:
        raise ValueError("a rate sweep needs at least 4 values of n")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be strictly increasing")
    reports = [bound(space, op_family.with_n(n), f, flavor, **kw) for n in n_values]
    lhs = [r.lhs for r in reports]
    rhs = [r.rhs for r in reports]
    mus = [r.mu_n for r in reports]
    s_l, r_l, x_l = fit_log_slope(n_values, lhs)
    s_r, r_r, x_r = fit_log_slope(n_values, rhs)
    defined = math.isfinite(s_l) and math.isfinite(s_r)
    return RateReport(n_values, lhs, rhs, mus, s_l, s_r, r_l, r_r, defined, x_l, x_r, reports)
