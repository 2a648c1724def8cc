"""Command-line runner for norms, moment tables, bound checks and rate sweeps.

Examples
--------
::

    korovkin norm --space lp:p=2 --fn one
    korovkin mu-table --space l1 --space sup --n 1 5 10
    korovkin bound-check --fn x --fn x2 --space l1 --space l2 --n 4 16 64
    korovkin rate-sweep --fn x --space l1 --n 4 8 16 32 64 --plot rates.svg
    korovkin bound-check --config experiment.json --out report.csv

A config file is a JSON object with the keys::

    {
      "functions": ["x", "abs:0.5", {"breaks": [0, 1], "coeffs": [[0, 1]]}],
      "spaces": ["l1", "morrey:p=2,p0=3"],
      "operator": "kantorovich",          # or "fejer"
      "n_values": [4, 8, 16, 32],
      "flavor": "shisha-mond",            # devore, trig-shisha-mond, trig-devore
      "resolution": 1024,                 # optional grid override for every space
      "strict": false,
      "out": "report.csv",                # optional
      "format": "csv",                    # or "json"
      "plot": "rates.svg"                 # rate-sweep only
    }

Flags given on the command line override the file.  Exit status is 0 when
everything passes, 1 when a bound is violated and 2 for usage or
configuration errors (no output file is written in that case).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import List, Optional

from .bounds import Flavor, bound, mu_n, rate_sweep, _mu_with_error
from .errors import KorovkinError
from .funcspace import DEFAULT_QUADRATURE
from .library import parse_function, parse_space
from .norms import norm
from .operators import OperatorSpec

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2

BOUND_COLUMNS = ["function", "space", "flavor", "n", "lhs", "mu_n", "omega", "term_unital", "term_main", "rhs",
                 "ratio", "holds", "est_error"]
MU_COLUMNS = ["space", "n", "mu_n", "mu_n_squared", "est_error"]
RATE_COLUMNS = ["function", "space", "n", "lhs", "rhs", "mu_n", "holds"]


class ConfigError(Exception):
    """Raised for anything that should end the run with exit code 2."""


@dataclass
class ExperimentConfig:
    functions: list = field(default_factory=list)
    spaces: list = field(default_factory=list)
    operator: str = "kantorovich"
    n_values: List[int] = field(default_factory=list)
    flavor: Optional[str] = None
    resolution: Optional[int] = None
    strict: bool = False
    out: Optional[str] = None
    format: str = "csv"
    plot: Optional[str] = None

    def validate(self, need_functions=True, min_n=1):
        if need_functions and not self.functions:
            raise ConfigError("no functions given (use --fn or 'functions')")
        if not self.spaces:
            raise ConfigError("no spaces given (use --space or 'spaces')")
        if len(self.n_values) < min_n:
            raise ConfigError(f"need at least {min_n} value(s) of n")
        if any(int(n) != n or n < 1 for n in self.n_values):
            raise ConfigError("n values must be positive integers")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigError("n values must be strictly increasing")
        if self.operator not in ("kantorovich", "fejer"):
            raise ConfigError(f"unknown operator {self.operator!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.flavor is not None:
            try:
                Flavor(self.flavor)
            except ValueError:
                raise ConfigError(f"unknown flavor {self.flavor!r}") from None

    @property
    def trig(self) -> bool:
        return self.operator == "fejer"

    def operator_spec(self, n: int) -> OperatorSpec:
        return OperatorSpec.fejer(n) if self.trig else OperatorSpec.kantorovich(n)

    def bound_flavor(self) -> Flavor:
        if self.flavor is None:
            return Flavor.TRIG_SHISHA_MOND if self.trig else Flavor.SHISHA_MOND
        fl = Flavor(self.flavor)
        if self.trig and not fl.trigonometric:
            fl = Flavor.TRIG_DEVORE if fl.uses_derivative else Flavor.TRIG_SHISHA_MOND
        return fl

    def space_descriptors(self):
        # spaces over [-pi, pi] are implied by the Fejer operator
        if self.trig:
            return [s if "@" in s else s + "@trig" for s in self.spaces]
        return list(self.spaces)


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            setattr(cfg, key, value)
        if "n_values" in raw:
            cfg.n_values = list(raw["n_values"])
    for key, attr in (("fn", "functions"), ("space", "spaces"), ("n", "n_values")):
        value = getattr(args, key, None)
        if value:
            setattr(cfg, attr, list(value))
    for key in ("operator", "flavor", "resolution", "out", "format", "plot"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "strict", False):
        cfg.strict = True
    return cfg


# ---------------------------------------------------------------------------
# formatting and output
# ---------------------------------------------------------------------------


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format(value, ".12g"))
    return value


def render(rows: List[dict], columns: List[str], form: str, extra: Optional[dict] = None) -> str:
    if form == "json":
        payload = {"records": [{c: _json_value(r[c]) for c in columns} for r in rows]}
        if extra:
            payload.update({k: _json_value(v) if not isinstance(v, list) else v for k, v in extra.items()})
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def write_atomic(path: str, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".korovkin-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out: Optional[str]):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def svg_rate_plot(n_values, lhs, rhs, slope_lhs, slope_rhs, title="") -> str:
    """A static log-log plot of the two sides against ``n + 1``."""
    width, height, margin = 560, 400, 60
    xs = [math.log10(n + 1) for n in n_values]
    series = [("lhs", lhs, "#1f77b4", slope_lhs), ("rhs", rhs, "#d62728", slope_rhs)]
    ys = [math.log10(v) for _, vals, _, _ in series for v in vals if v > 0]
    if not ys:
        ys = [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 15}" text-anchor="middle" font-size="13">log10(n+1)</text>',
        f'<text x="15" y="{height / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 15 {height / 2:.1f})">log10(value)</text>',
        f'<text x="{width / 2:.1f}" y="25" text-anchor="middle" font-size="14">{_escape(title)}</text>',
    ]
    for tick_x in (x0, x1):
        parts.append(f'<text x="{px(tick_x):.1f}" y="{height - margin + 16}" text-anchor="middle" '
                     f'font-size="11">{tick_x:.2f}</text>')
    for tick_y in (y0, y1):
        parts.append(f'<text x="{margin - 6}" y="{py(tick_y) + 4:.1f}" text-anchor="end" '
                     f'font-size="11">{tick_y:.2f}</text>')
    for k, (label, vals, colour, slope) in enumerate(series):
        pts = [f"{px(x):.2f},{py(math.log10(v)):.2f}" for x, v in zip(xs, vals) if v > 0]
        if len(pts) >= 2:
            parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{" ".join(pts)}"/>')
        slope_txt = "undefined" if not math.isfinite(slope) else f"{slope:.3f}"
        parts.append(f'<text x="{width - margin - 150}" y="{margin + 18 * k}" fill="{colour}" '
                     f'font-size="12">{label} slope {slope_txt}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _build(cfg: ExperimentConfig, need_functions=True):
    try:
        spaces = [parse_space(s, cfg.resolution) for s in cfg.space_descriptors()]
        functions = [parse_function(f) for f in cfg.functions] if need_functions else []
    except KorovkinError as exc:
        raise ConfigError(str(exc)) from exc
    if need_functions:
        for f in functions:
            if cfg.trig and not f.periodic:
                raise ConfigError(f"{f.name} is not periodic; the Fejer operator needs periodic functions")
            if not cfg.trig and f.periodic:
                raise ConfigError(f"{f.name} is periodic; use --operator fejer")
    return spaces, functions


def cmd_norm(args) -> int:
    try:
        space = parse_space(args.space[0], args.resolution)
        f = parse_function(args.fn[0])
    except KorovkinError as exc:
        raise ConfigError(str(exc)) from exc
    if f.domain != space.domain:
        raise ConfigError("function and space live on different intervals (add @trig to the space)")
    res = norm(space, f)
    row = {"space": space.label, "function": f.name, "value": res.value, "est_error": res.est_error,
           "method": res.method}
    if args.format == "json":
        text = render([row], list(row), "json")
    else:
        text = f"{fmt(res.value)}\n"
        sys.stderr.write(f"est_error {fmt(res.est_error)} ({res.method})\n")
    emit(text, args.out)
    return EXIT_OK


def cmd_mu_table(args) -> int:
    cfg = load_config(args)
    cfg.validate(need_functions=False)
    spaces, _ = _build(cfg, need_functions=False)
    rows = []
    for space in spaces:
        for n in cfg.n_values:
            mu, err, _ = _mu_with_error(space, cfg.operator_spec(int(n)), DEFAULT_QUADRATURE)
            rows.append({"space": space.label, "n": int(n), "mu_n": mu, "mu_n_squared": mu * mu,
                         "est_error": 2 * mu * err})
    emit(render(rows, MU_COLUMNS, cfg.format), cfg.out)
    return EXIT_OK


def _report_row(r) -> dict:
    return {"function": r.function, "space": r.space, "flavor": r.flavor, "n": r.n, "lhs": r.lhs, "mu_n": r.mu_n,
            "omega": r.omega_val, "term_unital": r.term_unital, "term_main": r.term_main + r.term_drift,
            "rhs": r.rhs, "ratio": r.ratio, "holds": r.holds, "est_error": r.est_error}


def _run_bound(flavor, space, op, f):
    try:
        return bound(space, op, f, flavor)
    except KorovkinError as exc:
        raise ConfigError(f"{f.name} in {space.label} at n={op.n}: {exc}") from exc


def cmd_bound_check(args) -> int:
    cfg = load_config(args)
    cfg.validate()
    spaces, functions = _build(cfg)
    flavor = cfg.bound_flavor()
    rows = []
    for f in functions:
        for space in spaces:
            for n in cfg.n_values:
                r = _run_bound(flavor, space, cfg.operator_spec(int(n)), f)
                row = _report_row(r)
                if cfg.strict:
                    row["holds"] = r.strict_holds
                rows.append(row)
    failures = sum(not r["holds"] for r in rows)
    finite = [r["ratio"] for r in rows if math.isfinite(r["ratio"])]
    worst = max(finite) if finite else float("nan")
    emit(render(rows, BOUND_COLUMNS, cfg.format,
                {"violations": failures, "worst_ratio": worst} if cfg.format == "json" else None), cfg.out)
    mode = "strict" if cfg.strict else "error-budgeted"
    sys.stderr.write(f"{len(rows)} records, {failures} violation(s) ({mode}), worst ratio {fmt(worst)}\n")
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_rate_sweep(args) -> int:
    cfg = load_config(args)
    cfg.validate(min_n=4)
    spaces, functions = _build(cfg)
    flavor = cfg.bound_flavor()
    rows, fits, plots = [], [], []
    failures = 0
    for f in functions:
        for space in spaces:
            try:
                rep = rate_sweep(space, cfg.operator_spec(int(cfg.n_values[0])), f, cfg.n_values, flavor)
            except KorovkinError as exc:
                raise ConfigError(f"{f.name} in {space.label}: {exc}") from exc
            for r in rep.reports:
                ok = r.strict_holds if cfg.strict else r.holds
                failures += not ok
                rows.append({"function": f.name, "space": space.label, "n": r.n, "lhs": r.lhs, "rhs": r.rhs,
                             "mu_n": r.mu_n, "holds": ok})
            fits.append({"function": f.name, "space": space.label,
                         "slope_lhs": _json_value(rep.slope_lhs), "slope_rhs": _json_value(rep.slope_rhs),
                         "residual_lhs": _json_value(rep.residual_lhs), "residual_rhs": _json_value(rep.residual_rhs),
                         "slopes_defined": rep.slopes_defined,
                         "excluded_first_lhs": rep.excluded_first_lhs, "excluded_first_rhs": rep.excluded_first_rhs})
            plots.append(svg_rate_plot(rep.n_values, rep.lhs_values, rep.rhs_values, rep.slope_lhs, rep.slope_rhs,
                                       f"{f.name} in {space.label}"))
    emit(render(rows, RATE_COLUMNS, cfg.format, {"fits": fits} if cfg.format == "json" else None), cfg.out)
    if cfg.plot:
        root, ext = os.path.splitext(cfg.plot)
        for k, svg in enumerate(plots):
            path = cfg.plot if len(plots) == 1 else f"{root}_{k}{ext or '.svg'}"
            write_atomic(path, svg)
    for fit in fits:
        if fit["slopes_defined"]:
            msg = f"slope_lhs {fmt(fit['slope_lhs'])} slope_rhs {fmt(fit['slope_rhs'])}"
        else:
            msg = "slopes undefined (a side vanishes)"
        sys.stderr.write(f"{fit['function']} in {fit['space']}: {msg}\n")
    return EXIT_VIOLATION if failures else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="korovkin", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, experiment=True):
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--resolution", type=int, help="grid resolution for every space")
        if experiment:
            p.add_argument("--config", help="JSON experiment file")
            p.add_argument("--space", action="append", help="space descriptor (repeatable)")
            p.add_argument("--n", type=int, nargs="+", help="operator orders, increasing")
            p.add_argument("--operator", choices=["kantorovich", "fejer"])

    p = sub.add_parser("norm", help="norm of one function in one space")
    p.add_argument("--space", action="append", required=True)
    p.add_argument("--fn", action="append", required=True)
    common(p, experiment=False)
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("mu-table", help="mu_n for each space and n")
    common(p)
    p.set_defaults(handler=cmd_mu_table)

    for name, handler, help_text in (
        ("bound-check", cmd_bound_check, "evaluate both sides of the bound"),
        ("rate-sweep", cmd_rate_sweep, "fit log-log convergence slopes"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--fn", action="append", help="function descriptor (repeatable)")
        p.add_argument("--flavor", choices=[f.value for f in Flavor])
        p.add_argument("--strict", action="store_true", help="compare raw values without error budget")
        if name == "rate-sweep":
            p.add_argument("--plot", help="write a log-log SVG plot to this path")
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None and args.command == "norm":
        args.format = "csv"
    try:
        return args.handler(args)
    except ConfigError as exc:
        sys.stderr.write(f"korovkin: error: {exc}\n")
        return EXIT_CONFIG
    except (KorovkinError, ValueError) as exc:
        sys.stderr.write(f"korovkin: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
