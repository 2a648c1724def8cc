"""Named test functions and the descriptor mini-language used by the CLI.

Function descriptors are ``name`` or ``name:arg[,key=value...]``::

    one  zero  x  x2  x3  mono:5  affine:a=2,b=-1  sqrt  pow:0.5
    abs  abs:0.3  step  step:c=0.4,w=0.1  exp  sinpi  hat
    cos  sin  cos:2  sin:3  trig-one          (periodic, on [-pi, pi])
    pp:{"breaks": [0, 0.5, 1], "coeffs": [[0, 1], [0.5, -1]]}

A piecewise polynomial lists breakpoints and, per piece, coefficients in
increasing powers of the local variable ``x - breaks[i]``.

Space descriptors are ``kind[:key=value,...]``::

    sup  l1  l2  lp:p=3  wlp:p=2,w=pow:0.5  grand:p=2  wgrand:p=2,w=x
    varlp:p=2  varlp:a=1.5,b=1  orlicz:q=2  orlicz:phi=exp
    morrey:p=2,p0=3  wmorrey:p=2,p0=3,w=pow:0.5  smallmorrey:p=2,lam=0.5
    weakmp:p=2

Appending ``@trig`` to a space descriptor (``sup@trig``) places it on
``[-pi, pi]``.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Dict

import numpy as np

from .errors import InvalidFunction, InvalidSpace
from .funcspace import PERIODIC_INTERVAL, UNIT_INTERVAL, FunctionHandle, constant
from .norms import SpaceSpec

STEP_WIDTH = 0.05
# max of sech^2(u) tanh(u), reached at tanh(u) = 1/sqrt(3)
_SECH2_TANH_MAX = 2.0 / (3.0 * math.sqrt(3.0))


def _fh(func, deriv=None, lip=None, name="", bps=(), deriv_lip=None, domain=UNIT_INTERVAL, periodic=False):
    d = None
    if deriv is not None:
        d = FunctionHandle(deriv, domain=domain, lipschitz=deriv_lip, periodic=periodic, name=f"{name}'")
    return FunctionHandle(func, domain=domain, derivative=d, lipschitz=lip, periodic=periodic, name=name,
                          breakpoints=bps)


def monomial(k: int) -> FunctionHandle:
    k = int(k)
    if k < 0:
        raise InvalidFunction("monomial degree must be nonnegative")
    if k == 0:
        return one()
    name = "x" if k == 1 else f"x^{k}"
    if k == 1:
        return _fh(lambda x: np.asarray(x, float).copy(), lambda x: np.ones(np.shape(x)), 1.0, name, deriv_lip=0.0)
    return _fh(lambda x: np.asarray(x, float) ** k, lambda x: k * np.asarray(x, float) ** (k - 1), float(k), name,
               deriv_lip=float(k * (k - 1)))


def one() -> FunctionHandle:
    return FunctionHandle(constant(1.0).func, derivative=constant(0.0), lipschitz=0.0, name="one")


def zero() -> FunctionHandle:
    return FunctionHandle(constant(0.0).func, derivative=constant(0.0), lipschitz=0.0, name="zero")


def affine(a: float = 1.0, b: float = 0.0) -> FunctionHandle:
    a, b = float(a), float(b)
    return _fh(lambda x: a * np.asarray(x, float) + b, lambda x: np.full(np.shape(x), a), abs(a),
               f"{a:g}x+{b:g}", deriv_lip=0.0)


def power(alpha: float) -> FunctionHandle:
    """``x^alpha`` for ``alpha > 0``; no derivative or Lipschitz constant when ``alpha < 1``."""
    alpha = float(alpha)
    if not alpha > 0:
        raise InvalidFunction("power exponent must be positive")
    if alpha >= 1:
        return _fh(lambda x: np.asarray(x, float) ** alpha,
                   lambda x: alpha * np.asarray(x, float) ** (alpha - 1), alpha, f"x^{alpha:g}")
    return FunctionHandle(lambda x: np.asarray(x, float) ** alpha, name=f"x^{alpha:g}")


def sqrt() -> FunctionHandle:
    return FunctionHandle(np.sqrt, name="sqrt")


def abs_shift(c: float = 0.5) -> FunctionHandle:
    c = float(c)
    return FunctionHandle(lambda x: np.abs(np.asarray(x, float) - c), lipschitz=1.0, name=f"|x-{c:g}|",
                          breakpoints=(c,))


def smooth_step(c: float = 0.5, w: float = STEP_WIDTH) -> FunctionHandle:
    """``(1 + tanh((x - c)/w)) / 2``."""
    c, w = float(c), float(w)
    if not w > 0:
        raise InvalidFunction("step width must be positive")
    return _fh(
        lambda x: 0.5 * (1.0 + np.tanh((np.asarray(x, float) - c) / w)),
        lambda x: 0.5 / w / np.cosh((np.asarray(x, float) - c) / w) ** 2,
        0.5 / w,
        f"step({c:g},{w:g})",
        deriv_lip=_SECH2_TANH_MAX / w**2,
    )


def exp() -> FunctionHandle:
    return _fh(np.exp, np.exp, math.e, "exp", deriv_lip=math.e)


def sinpi() -> FunctionHandle:
    return _fh(lambda x: np.sin(math.pi * np.asarray(x, float)),
               lambda x: math.pi * np.cos(math.pi * np.asarray(x, float)), math.pi, "sinpi",
               deriv_lip=math.pi**2)


def hat() -> FunctionHandle:
    """``1 - |2x - 1|``: a tent with a kink at 1/2."""
    return FunctionHandle(lambda x: 1.0 - np.abs(2.0 * np.asarray(x, float) - 1.0), lipschitz=2.0, name="hat",
                          breakpoints=(0.5,))


def trig_cos(k: int = 1) -> FunctionHandle:
    k = int(k)
    name = "cos" if k == 1 else f"cos{k}x"
    return _fh(lambda x: np.cos(k * np.asarray(x, float)), lambda x: -k * np.sin(k * np.asarray(x, float)),
               float(abs(k)), name, deriv_lip=float(k * k), domain=PERIODIC_INTERVAL, periodic=True)


def trig_sin(k: int = 1) -> FunctionHandle:
    k = int(k)
    name = "sin" if k == 1 else f"sin{k}x"
    return _fh(lambda x: np.sin(k * np.asarray(x, float)), lambda x: k * np.cos(k * np.asarray(x, float)),
               float(abs(k)), name, deriv_lip=float(k * k), domain=PERIODIC_INTERVAL, periodic=True)


def trig_one() -> FunctionHandle:
    z = constant(0.0, PERIODIC_INTERVAL, periodic=True)
    return FunctionHandle(constant(1.0, PERIODIC_INTERVAL, True).func, domain=PERIODIC_INTERVAL,
                          derivative=z, lipschitz=0.0, periodic=True, name="one")


def piecewise_polynomial(breaks, coeffs, name: str = "pp") -> FunctionHandle:
    """Piecewise polynomial on ``[breaks[0], breaks[-1]] = [0, 1]``.

    ``coeffs[i]`` holds the coefficients of piece ``i`` in increasing powers
    of ``x - breaks[i]``.  Continuity is not required, but when the pieces
    join continuously with continuous slopes a derivative is attached.
    """
    b = np.asarray(breaks, dtype=float)
    if b.ndim != 1 or b.size < 2 or np.any(np.diff(b) <= 0):
        raise InvalidFunction("breaks must be a strictly increasing list of at least two points")
    if not (math.isclose(b[0], 0.0) and math.isclose(b[-1], 1.0)):
        raise InvalidFunction("breaks must start at 0 and end at 1")
    if len(coeffs) != b.size - 1:
        raise InvalidFunction("need one coefficient list per piece")
    arrays = [np.atleast_1d(np.asarray(c, dtype=float)) for c in coeffs]
    if any(c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)) for c in arrays):
        raise InvalidFunction("coefficient lists must be nonempty and finite")
    polys = [np.polynomial.Polynomial(c) for c in arrays]
    derivs = [p.deriv() for p in polys]

    def piece_eval(plist):
        def ev(x):
            x = np.asarray(x, dtype=float)
            idx = np.clip(np.searchsorted(b, x, side="right") - 1, 0, len(plist) - 1)
            out = np.empty_like(x)
            for i, p in enumerate(plist):
                m = idx == i
                if np.any(m):
                    out[m] = p(x[m] - b[i])
            return out
        return ev

    widths = np.diff(b)
    # sup of |p'| per piece from a dense sample; exact enough for a slack constant
    lip = 0.0
    for p, d, w in zip(polys, derivs, widths):
        t = np.linspace(0.0, w, 257)
        lip = max(lip, float(np.max(np.abs(d(t)))))
    jumps = [abs(polys[i](widths[i]) - polys[i + 1](0.0)) for i in range(len(polys) - 1)]
    kinks = [abs(derivs[i](widths[i]) - derivs[i + 1](0.0)) for i in range(len(polys) - 1)]
    continuous = all(j < 1e-12 for j in jumps)
    smooth = continuous and all(k < 1e-12 for k in kinks)
    deriv = FunctionHandle(piece_eval(derivs), name=f"{name}'", breakpoints=tuple(b[1:-1])) if smooth else None
    return FunctionHandle(piece_eval(polys), derivative=deriv, lipschitz=lip if continuous else None, name=name,
                          breakpoints=tuple(b[1:-1]))


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

_SIMPLE: Dict[str, Callable[[], FunctionHandle]] = {
    "one": one,
    "zero": zero,
    "x": lambda: monomial(1),
    "x2": lambda: monomial(2),
    "x3": lambda: monomial(3),
    "sqrt": sqrt,
    "exp": exp,
    "sinpi": sinpi,
    "hat": hat,
    "trig-one": trig_one,
}

#: the algebraic corpus used by the property and acceptance suites
CORPUS = ("one", "x", "x2", "x3", "sqrt", "abs", "step", "exp", "sinpi", "hat", "affine:a=-2,b=1", "pow:1.5")


def _kv(arg: str) -> tuple:
    pos, kw = [], {}
    if not arg:
        return pos, kw
    for part in arg.split(","):
        part = part.strip()
        if "=" in part:
            k, v = part.split("=", 1)
            kw[k.strip()] = v.strip()
        elif part:
            pos.append(part)
    return pos, kw


def _num(v: str, what: str) -> float:
    try:
        out = float(v)
    except ValueError as exc:
        raise InvalidFunction(f"{what}: expected a number, got {v!r}") from exc
    if not math.isfinite(out):
        raise InvalidFunction(f"{what}: value must be finite")
    return out


def parse_function(desc) -> FunctionHandle:
    """Build a :class:`FunctionHandle` from a descriptor string or a ``pp`` mapping."""
    if isinstance(desc, dict):
        if "breaks" not in desc or "coeffs" not in desc:
            raise InvalidFunction("piecewise descriptors need 'breaks' and 'coeffs'")
        return piecewise_polynomial(desc["breaks"], desc["coeffs"], name=str(desc.get("name", "pp")))
    if not isinstance(desc, str) or not desc.strip():
        raise InvalidFunction(f"bad function descriptor {desc!r}")
    desc = desc.strip()
    head, _, arg = desc.partition(":")
    head = head.lower()
    if head == "pp":
        try:
            spec = json.loads(arg)
        except json.JSONDecodeError as exc:
            raise InvalidFunction(f"pp descriptor is not valid JSON: {exc}") from exc
        spec.setdefault("name", "pp")
        return parse_function(spec)
    if head in _SIMPLE:
        if arg:
            raise InvalidFunction(f"{head} takes no arguments")
        return _SIMPLE[head]()
    pos, kw = _kv(arg)

    def get(key, index, default):
        if key in kw:
            return _num(kw[key], f"{head}.{key}")
        if len(pos) > index:
            return _num(pos[index], f"{head}.{key}")
        return default

    if head == "mono":
        k = get("k", 0, None)
        if k is None or k != int(k):
            raise InvalidFunction("mono needs an integer degree, e.g. mono:3")
        return monomial(int(k))
    if head == "pow":
        a = get("a", 0, None)
        if a is None:
            raise InvalidFunction("pow needs an exponent, e.g. pow:0.5")
        return power(a)
    if head == "affine":
        return affine(get("a", 0, 1.0), get("b", 1, 0.0))
    if head == "abs":
        return abs_shift(get("c", 0, 0.5))
    if head == "step":
        return smooth_step(get("c", 0, 0.5), get("w", 1, STEP_WIDTH))
    if head == "cos":
        return trig_cos(int(get("k", 0, 1)))
    if head == "sin":
        return trig_sin(int(get("k", 0, 1)))
    raise InvalidFunction(f"unknown function {head!r}")


def _young(kw) -> dict:
    if "q" in kw:
        q = float(kw["q"])
        if not q > 1:
            raise InvalidSpace("orlicz q must exceed 1")
        r = q / (q - 1.0)
        return dict(young_phi=lambda t: np.asarray(t, float) ** q / q,
                    young_psi=lambda s: np.asarray(s, float) ** r / r, name=f"Orlicz(t^{q:g}/{q:g})")
    phi = kw.get("phi", "")
    if phi == "exp":
        return dict(young_phi=lambda t: np.expm1(np.asarray(t, float)), name="Orlicz(e^t-1)")
    if phi == "llog":
        return dict(young_phi=lambda t: np.asarray(t, float) * np.log1p(np.asarray(t, float)),
                    name="Orlicz(t log(1+t))")
    raise InvalidSpace("orlicz needs q=<exponent> or phi=exp|llog")


def parse_space(desc: str, resolution=None) -> SpaceSpec:
    """Build a :class:`SpaceSpec` from a descriptor such as ``morrey:p=2,p0=3``."""
    if not isinstance(desc, str) or not desc.strip():
        raise InvalidSpace(f"bad space descriptor {desc!r}")
    desc = desc.strip()
    base, _, where = desc.partition("@")
    if where not in ("", "trig"):
        raise InvalidSpace(f"unknown domain tag @{where}")
    domain = PERIODIC_INTERVAL if where == "trig" else UNIT_INTERVAL
    head, _, arg = base.partition(":")
    head = head.lower()
    # weights are function descriptors and may themselves contain ':'
    pos, kw = _kv(arg)
    common = {"domain": domain}
    if resolution is not None:
        common["resolution"] = int(resolution)

    def num(key, default=None):
        if key not in kw:
            if default is None:
                raise InvalidSpace(f"{head} needs {key}=...")
            return default
        try:
            return float(kw[key])
        except ValueError as exc:
            raise InvalidSpace(f"{head}.{key}: expected a number, got {kw[key]!r}") from exc

    def weight():
        if "w" not in kw:
            raise InvalidSpace(f"{head} needs w=<function>")
        try:
            w = parse_function(kw["w"])
        except InvalidFunction as exc:
            raise InvalidSpace(f"bad weight: {exc}") from exc
        if w.domain != domain:
            raise InvalidSpace("weight must live on the space's domain")
        return w

    if pos:
        raise InvalidSpace(f"{head}: arguments must be key=value, got {pos}")
    if head == "sup":
        return SpaceSpec.sup(**common)
    if head.startswith("l") and head[1:].replace(".", "", 1).isdigit():
        return SpaceSpec.lp(float(head[1:]), **common)
    if head == "lp":
        return SpaceSpec.lp(num("p"), **common)
    if head == "wlp":
        return SpaceSpec.weighted_lp(num("p"), weight(), **common)
    if head == "grand":
        return SpaceSpec.grand_lp(num("p"), **common)
    if head == "wgrand":
        return SpaceSpec.weighted_grand_lp(num("p"), weight(), **common)
    if head == "varlp":
        if "p" in kw:
            c = num("p")
            ex = FunctionHandle(lambda t: np.full(np.shape(t), c), domain=domain, lipschitz=0.0, name=f"{c:g}")
        else:
            a, b = num("a"), num("b", 0.0)
            ex = FunctionHandle(lambda t: a + b * np.asarray(t, float), domain=domain, lipschitz=abs(b),
                                name=f"{a:g}+{b:g}t")
        return SpaceSpec.variable_lp(ex, **common)
    if head == "orlicz":
        return SpaceSpec.orlicz(**_young(kw), **common)
    if head == "morrey":
        return SpaceSpec.morrey(num("p"), num("p0"), **common)
    if head == "wmorrey":
        return SpaceSpec.weighted_morrey(num("p"), num("p0"), weight(), **common)
    if head == "smallmorrey":
        return SpaceSpec.small_morrey(num("p"), num("lam"), **common)
    if head == "weakmp":
        return SpaceSpec.weak_mp(num("p"), **common)
    raise InvalidSpace(f"unknown space kind {head!r}")
