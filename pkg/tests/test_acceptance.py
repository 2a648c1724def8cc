"""Acceptance suite: twelve end-to-end criteria at their stated tolerances.

Each test records a title and a one-line detail; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.  Run this file alone
with ``python3 tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py``.
"""

import math
import sys

import numpy as np
import pytest
from oracles import fejer_via_partial_sums, modulus_all_pairs, set_sup_brute

from korovkin.bounds import devore_bound, mu_n, rate_sweep, shisha_mond_bound, trig_bound
from korovkin.funcspace import FunctionHandle
from korovkin.library import CORPUS, monomial, one, parse_function, parse_space
from korovkin.modulus import modulus_of_continuity
from korovkin.norms import SpaceSpec, fundamental_constant, norm
from korovkin.operators import OperatorSpec, fejer_apply, kantorovich_apply

# spaces and degrees shared by the two Kantorovich bound criteria
BOUND_SPACES = ["sup", "l1", "l2", "l4", "grand:p=2", "morrey:p=2,p0=3", "weakmp:p=2", "varlp:p=2",
                "varlp:a=1.5,b=1"]
BOUND_N = [4, 8, 16, 32, 64, 128]
# one representative of each of the eleven space kinds
ALL_KINDS = ["sup", "l2", "wlp:p=2,w=pow:0.5", "grand:p=2", "wgrand:p=2,w=pow:0.5", "varlp:a=1.5,b=1",
             "orlicz:q=2", "morrey:p=2,p0=3", "wmorrey:p=2,p0=3,w=pow:0.5", "smallmorrey:p=2,lam=0.5", "weakmp:p=2"]


@pytest.fixture
def criterion(record_property):
    """Returns ``start(title)``; ``start`` returns ``detail(text)`` for the summary line."""

    def start(title):
        record_property("criterion", title)

        def detail(text):
            record_property("detail", text)

        return detail

    return start


def kantorovich(n):
    return OperatorSpec.kantorovich(n)


def test_criterion_01(criterion):
    detail = criterion("Kantorovich unitality")
    x = np.linspace(0.0, 1.0, 1001)
    worst = 0.0
    for n in (1, 2, 5, 10, 50, 200):
        worst = max(worst, float(np.max(np.abs(kantorovich_apply(one(), n, x) - 1.0))))
    detail(f"max |K_n(1) - 1| = {worst:.2e} (tol 1e-12)")
    assert worst <= 1e-12


def test_criterion_02(criterion):
    detail = criterion("Kantorovich moment identities")
    x = np.linspace(0.0, 1.0, 33)
    worst = 0.0
    for n in (1, 2, 5, 10, 50):
        first = (2 * n * x + 1) / (2 * (n + 1))
        second = (3 * n * (n - 1) * x**2 + 6 * n * x + 1) / (3 * (n + 1) ** 2)
        worst = max(worst, float(np.max(np.abs(kantorovich_apply(monomial(1), n, x) - first))),
                    float(np.max(np.abs(kantorovich_apply(monomial(2), n, x) - second))))
    detail(f"max deviation {worst:.2e} (tol 1e-9)")
    assert worst <= 1e-9


def test_criterion_03(criterion):
    detail = criterion("mu_n^2 in L1 equals 1/(6(n+1))")
    worst = 0.0
    values = {}
    for n in (1, 5, 10, 50, 200):
        sq = mu_n(SpaceSpec.lp(1), kantorovich(n)) ** 2
        values[n] = sq
        worst = max(worst, abs(sq - 1 / (6 * (n + 1))))
    detail(f"n=1 -> {values[1]:.12g}, n=5 -> {values[5]:.12g}, max error {worst:.2e} (tol 1e-8)")
    assert worst <= 1e-8
    assert values[1] == pytest.approx(1 / 12, abs=1e-8) and values[5] == pytest.approx(1 / 36, abs=1e-8)


def test_criterion_04(criterion):
    detail = criterion("Lp moment bound mu_n^2 <= (n+1)^(-1/p)")
    margin = math.inf
    for p in (1, 2, 4):
        for n in (1, 10, 100):
            sq = mu_n(SpaceSpec.lp(p), kantorovich(n)) ** 2
            margin = min(margin, (1 / (n + 1)) ** (1 / p) + 1e-8 - sq)
    detail(f"smallest margin {margin:.3e}")
    assert margin >= 0


def _bound_grid(make_bound, functions):
    failures, worst, count = [], 0.0, 0
    for desc in functions:
        f = parse_function(desc)
        for sdesc in BOUND_SPACES:
            s = parse_space(sdesc)
            for n in BOUND_N:
                r = make_bound(s, kantorovich(n), f)
                count += 1
                worst = max(worst, r.ratio)
                if not r.holds:
                    failures.append((desc, sdesc, n, r.lhs, r.rhs))
    return failures, worst, count


def test_criterion_05(criterion):
    detail = criterion("modulus-form bound holds on the corpus")
    failures, worst, count = _bound_grid(shisha_mond_bound, ["x", "x2", "sqrt", "abs", "step"])
    detail(f"{count - len(failures)}/{count} hold, worst lhs/rhs {worst:.3f}")
    assert not failures, failures[:5]


def test_criterion_06(criterion):
    detail = criterion("derivative-form bound holds; affine rhs = sqrt(c) mu_n |a|")
    failures, worst, count = _bound_grid(devore_bound, ["x2", "x3", "sinpi"])
    affine_err = 0.0
    for a, b in ((-2.0, 1.0), (3.0, 0.5)):
        f = parse_function(f"affine:a={a},b={b}")
        for sdesc in BOUND_SPACES:
            s = parse_space(sdesc)
            c = fundamental_constant(s)
            for n in BOUND_N:
                r = devore_bound(s, kantorovich(n), f)
                expected = math.sqrt(c) * mu_n(s, kantorovich(n)) * abs(a)
                affine_err = max(affine_err, abs(r.rhs - expected))
                if not r.holds:
                    failures.append((f.name, sdesc, n, r.lhs, r.rhs))
    detail(f"{count - len(failures)}/{count} smooth cases hold, worst lhs/rhs {worst:.3f}; "
           f"affine rhs error {affine_err:.1e} (tol 1e-9)")
    assert not failures, failures[:5]
    assert affine_err <= 1e-9


def test_criterion_07(criterion):
    detail = criterion("trigonometric bound, Fejer eigenvalue and mu_n in Sup")
    ns = [4, 8, 16, 32, 64]
    failures, worst = [], 0.0
    for sdesc in ("sup@trig", "l1@trig"):
        s = parse_space(sdesc)
        for desc in ("cos", "sin", "cos:2"):
            f = parse_function(desc)
            for n in ns:
                r = trig_bound(s, OperatorSpec.fejer(n), f)
                worst = max(worst, r.ratio)
                if not r.holds:
                    failures.append((desc, sdesc, n, r.lhs, r.rhs))
    # confirm the derived values by independent quadrature before asserting them
    probe = (-2.0, 0.3, 1.7)
    for n in (4, 16):
        for x in probe:
            assert fejer_via_partial_sums(math.cos, n, x) == pytest.approx(n / (n + 1) * math.cos(x), abs=1e-10)
            moment = fejer_via_partial_sums(lambda t, x=x: math.sin((x - t) / 2) ** 2, n, x)
            assert math.pi * math.sqrt(moment) == pytest.approx(math.pi / math.sqrt(2 * (n + 1)), abs=1e-10)
    x = np.linspace(-math.pi, math.pi, 33)
    eig_err = mu_err = 0.0
    sup = parse_space("sup@trig")
    for n in ns:
        eig_err = max(eig_err, float(np.max(np.abs(fejer_apply(parse_function("cos"), n, x)
                                                   - n / (n + 1) * np.cos(x)))))
        mu_err = max(mu_err, abs(mu_n(sup, OperatorSpec.fejer(n)) - math.pi / math.sqrt(2 * (n + 1))))
    detail(f"{30 - len(failures)}/30 hold, worst lhs/rhs {worst:.3f}; eigen error {eig_err:.1e} (tol 1e-7); "
           f"mu_n error {mu_err:.1e} (tol 1e-6)")
    assert not failures, failures
    assert eig_err <= 1e-7 and mu_err <= 1e-6


def test_criterion_08(criterion):
    detail = criterion("rate reproduction for f = x in L1")
    ns = [4 * 2**k for k in range(8)]
    rep = rate_sweep(SpaceSpec.lp(1), kantorovich(ns[0]), monomial(1), ns)
    detail(f"slope_rhs {rep.slope_rhs:.4f} (-0.50 +- 0.05), slope_lhs {rep.slope_lhs:.4f} (-1.00 +- 0.10)")
    assert abs(rep.slope_rhs + 0.5) <= 0.05
    assert abs(rep.slope_lhs + 1.0) <= 0.10
    # the left side is exactly 1/(4(n+1))
    np.testing.assert_allclose(rep.lhs_values, [1 / (4 * (n + 1)) for n in ns], rtol=1e-9)


def test_criterion_09(criterion):
    detail = criterion("weak Morrey / small Morrey kernels match brute force over cell unions")
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 13))
        vals = rng.uniform(-3, 3, n) * (rng.random(n) > 0.2)
        p = float(rng.uniform(1.05, 4.0))
        lam = float(rng.uniform(0.05, 0.95))
        f = FunctionHandle(lambda t, v=vals, m=n: v[np.minimum((np.asarray(t) * m).astype(int), m - 1)])
        weak = norm(SpaceSpec.weak_mp(p, resolution=n), f).value
        small = norm(SpaceSpec.small_morrey(p, lam, resolution=n), f).value
        worst = max(worst, abs(weak - set_sup_brute(vals, "weak", p)),
                    abs(small - set_sup_brute(vals, "small", p, lam)))
    detail(f"50 instances, max deviation {worst:.1e} (tol 1e-9)")
    assert worst <= 1e-9


def test_criterion_10(criterion):
    detail = criterion("norm axioms on the 12-function corpus in all 11 space kinds")
    corpus = [parse_function(d) for d in CORPUS]
    dampers = [parse_function(d) for d in ("sinpi", "x", "step")]
    sup = SpaceSpec.sup()
    problems = []
    checks = 0
    for sdesc in ALL_KINDS:
        s = parse_space(sdesc)
        c0 = fundamental_constant(s)
        base = [norm(s, f) for f in corpus]
        for f, nf in zip(corpus, base):
            for a in (0.5, 2.0, 10.0):
                checks += 1
                if abs(norm(s, a * f).value - a * nf.value) > 1e-8 * a * nf.value:
                    problems.append(("homogeneity", sdesc, f.name, a))
            for h in dampers:
                g = FunctionHandle(lambda x, f=f, h=h: f(x) * h(x),
                                   breakpoints=tuple(sorted(set(f.breakpoints + h.breakpoints))))
                checks += 1
                if norm(s, g).value > nf.value + nf.est_error:
                    problems.append(("monotonicity", sdesc, f.name, h.name))
            checks += 1
            if nf.value > c0 * norm(sup, f).value + nf.est_error:
                problems.append(("embedding", sdesc, f.name))
        for i in range(len(corpus)):
            for j in range(i + 1, len(corpus)):
                checks += 1
                if norm(s, corpus[i] + corpus[j]).value > base[i].value + base[j].value + 1e-8:
                    problems.append(("triangle", sdesc, corpus[i].name, corpus[j].name))
    detail(f"{checks - len(problems)}/{checks} checks pass")
    assert not problems, problems[:5]


def test_criterion_11(criterion):
    detail = criterion("modulus estimator: oracle, closed forms, properties")
    corpus = [parse_function(d) for d in CORPUS]
    n = 4096
    x = np.linspace(0.0, 1.0, n)
    oracle_err = 0.0
    for f in corpus:
        v = f(x)
        for w in (1, 41, 410):
            delta = w / (n - 1)
            est = modulus_of_continuity(f, delta, resolution=n, max_points=n).value
            oracle_err = max(oracle_err, abs(est - modulus_all_pairs(x, v, delta)))
    assert oracle_err <= 1e-9

    closed = [("x", 0.1, 0.1), ("x2", 0.1, 0.19), ("sqrt", 0.25, 0.5)]
    closed_err = max(abs(modulus_of_continuity(parse_function(d), delta).value - want) for d, delta, want in closed)
    assert closed_err <= 1e-4

    # monotone in delta, the (1 + [lambda]) scaling law, and the pointwise bound
    deltas = np.geomspace(1e-3, 0.9, 12)
    grid = np.linspace(0.0, 1.0, 201)
    for f in corpus:
        vals = [modulus_of_continuity(f, d).value for d in deltas]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:])), f.name
        small = modulus_of_continuity(f, 0.05)
        for lam in (1.5, 2.0, 3.7):
            big = modulus_of_continuity(f, lam * 0.05)
            k = 1 + math.floor(lam)
            assert big.value <= k * small.value + big.error + k * small.error, (f.name, lam)
        est = modulus_of_continuity(f, 0.07)
        v = f(grid)
        bound = (1 + (grid[:, None] - grid[None, :]) ** 2 / 0.07**2) * est.value
        assert np.all(np.abs(v[:, None] - v[None, :]) <= bound + est.error + 1e-12), f.name

    # vanishing limit: omega(f, 2^-k) decreases in k and falls below 1e-3
    at_12, reached = {}, {}
    for f in corpus:
        seq = [modulus_of_continuity(f, 2.0**-k).value for k in range(1, 13)]
        assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:])), f.name
        at_12[f.name] = seq[-1]
        k, value = 12, seq[-1]
        while value >= 1e-3 and k < 24:
            k += 1
            nxt = modulus_of_continuity(f, 2.0**-k).value
            assert nxt <= value + 1e-12, f.name
            value = nxt
        assert value < 1e-3, f.name
        reached[f.name] = k
    late = {name: f"{at_12[name]:.2e} at k=12, < 1e-3 from k={k}" for name, k in reached.items() if k > 12}
    detail(f"oracle error {oracle_err:.1e}, closed-form error {closed_err:.1e}; "
           f"{len(corpus) - len(late)}/{len(corpus)} below 1e-3 at k=12; later: {late}")


def test_criterion_12(criterion):
    detail = criterion("grand Lebesgue fundamental constant c = p - 1")
    values = {p: fundamental_constant(SpaceSpec.grand_lp(p)) for p in (2, 3, 4)}
    detail(", ".join(f"p={p}: {c:.6f}" for p, c in values.items()) + " (window +-0.02)")
    for p, c in values.items():
        assert p - 1 - 0.02 <= c <= p - 1 + 0.02


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
