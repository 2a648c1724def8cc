"""Property-based checks of the norm axioms, rearrangements and operator structure."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from korovkin.funcspace import FunctionHandle, SampledFunction, decreasing_rearrangement
from korovkin.library import CORPUS, parse_function, parse_space
from korovkin.norms import fundamental_constant, norm
from korovkin.operators import fejer_apply, kantorovich_apply

SPACES = [
    "sup", "l2", "wlp:p=2,w=pow:0.5", "grand:p=2", "wgrand:p=2,w=pow:0.5", "varlp:a=1.5,b=1", "orlicz:q=2",
    "morrey:p=2,p0=3", "wmorrey:p=2,p0=3,w=pow:0.5", "smallmorrey:p=2,lam=0.5", "weakmp:p=2",
]
# spaces whose norm depends only on the distribution of |f|
REARRANGEMENT_INVARIANT = ["sup", "l2", "grand:p=2", "orlicz:q=2", "smallmorrey:p=2,lam=0.5", "weakmp:p=2"]

# relative tolerance of the norm engines on smooth inputs
REL = 1e-8
PROFILE = settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])

magnitudes = st.floats(0.05, 5.0)
signs = st.sampled_from([-1.0, 1.0])
members = st.sampled_from(CORPUS)


@st.composite
def combos(draw):
    """``a f + b g`` for corpus members ``f`` and ``g``."""
    f, g = parse_function(draw(members)), parse_function(draw(members))
    a = draw(signs) * draw(magnitudes)
    b = draw(st.sampled_from([0.0, 1.0])) * draw(signs) * draw(magnitudes)
    return a * f + b * g


def space(desc):
    return parse_space(desc)


def slack(*results):
    return sum(r.est_error for r in results)


def sup_abs(f):
    x = np.linspace(0.0, 1.0, 100001)
    return float(np.max(np.abs(f(x))))


@pytest.mark.parametrize("desc", SPACES)
class TestNormAxioms:
    @PROFILE
    @given(combos(), signs, magnitudes)
    def test_homogeneity(self, desc, f, sign, lam):
        s = space(desc)
        base = norm(s, f)
        scaled = norm(s, (sign * lam) * f)
        assert scaled.value == pytest.approx(lam * base.value, rel=REL, abs=slack(base, scaled) * (1 + lam))

    @PROFILE
    @given(combos(), combos())
    def test_triangle(self, desc, f, g):
        s = space(desc)
        nf, ng, nfg = norm(s, f), norm(s, g), norm(s, f + g)
        assert nfg.value <= (nf.value + ng.value) * (1 + REL) + slack(nf, ng, nfg)

    @PROFILE
    @given(combos(), st.sampled_from(["sinpi", "step", "hat", "x", "one"]))
    def test_lattice_monotonicity(self, desc, f, damp):
        # |f h| <= |f| whenever 0 <= h <= 1
        s = space(desc)
        h = parse_function(damp)
        fh = FunctionHandle(lambda x: f(x) * h(x), breakpoints=tuple(sorted(set(f.breakpoints + h.breakpoints))))
        small, big = norm(s, fh), norm(s, f)
        assert small.value <= big.value * (1 + REL) + slack(small, big)

    @PROFILE
    @given(combos())
    def test_embedding_in_sup(self, desc, f):
        s = space(desc)
        r = norm(s, f)
        assert r.value <= fundamental_constant(s) * sup_abs(f) * (1 + REL) + r.est_error

    @PROFILE
    @given(combos())
    def test_nonnegative_and_sign_blind(self, desc, f):
        s = space(desc)
        r, m = norm(s, f), norm(s, -1.0 * f)
        assert r.value >= 0.0 and r.value == pytest.approx(m.value, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("desc", REARRANGEMENT_INVARIANT)
@PROFILE
@given(combos())
def test_reflection_invariance(desc, f):
    s = space(desc)
    reflected = FunctionHandle(lambda x: f(1.0 - np.asarray(x, float)),
                               breakpoints=tuple(sorted(1.0 - b for b in f.breakpoints)))
    a, b = norm(s, f), norm(s, reflected)
    assert a.value == pytest.approx(b.value, rel=REL, abs=slack(a, b))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=200))
def test_rearrangement_is_equimeasurable(values):
    s = SampledFunction(np.asarray(values, dtype=float))
    r = decreasing_rearrangement(s).values
    np.testing.assert_array_equal(np.sort(r)[::-1], np.sort(np.abs(values))[::-1])
    assert np.all(np.diff(r) <= 0)
    for q in (1.0, 2.0, 3.5):
        assert np.sum(r**q) == pytest.approx(np.sum(np.abs(values) ** q), rel=1e-12, abs=1e-300)


PROBES = np.linspace(0.0, 1.0, 33)
TRIG_PROBES = np.linspace(-math.pi, math.pi, 33)


class TestOperators:
    @settings(max_examples=25, deadline=None)
    @given(members, members, st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 40))
    def test_kantorovich_linearity(self, fd, gd, a, b, n):
        f, g = parse_function(fd), parse_function(gd)
        lhs = kantorovich_apply(a * f + b * g, n, PROBES)
        rhs = a * kantorovich_apply(f, n, PROBES) + b * kantorovich_apply(g, n, PROBES)
        scale = 1 + abs(a) * sup_abs(f) + abs(b) * sup_abs(g)
        np.testing.assert_allclose(lhs, rhs, atol=1e-11 * scale)

    @settings(max_examples=25, deadline=None)
    @given(members, st.integers(1, 60))
    def test_kantorovich_positivity_and_range(self, fd, n):
        f = parse_function(fd)
        x = np.linspace(0.0, 1.0, 201)
        v = f(np.linspace(0.0, 1.0, 20001))
        out = kantorovich_apply(f, n, PROBES)
        # a positive unital operator maps into the convex hull of the range
        assert np.all(out >= v.min() - 1e-12) and np.all(out <= v.max() + 1e-12)
        sq = FunctionHandle(lambda t: f(t) ** 2, breakpoints=f.breakpoints)
        assert np.all(kantorovich_apply(sq, n, x) >= -1e-13)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.floats(-2, 2), st.floats(-2, 2), st.integers(1, 20))
    def test_fejer_linearity_and_range(self, j, k, a, b, n):
        f = a * parse_function(f"cos:{j}") + b * parse_function(f"sin:{k}")
        out = fejer_apply(f, n, TRIG_PROBES)
        want = (a * max(0, 1 - j / (n + 1)) * np.cos(j * TRIG_PROBES)
                + b * max(0, 1 - k / (n + 1)) * np.sin(k * TRIG_PROBES))
        np.testing.assert_allclose(out, want, atol=1e-9 * (1 + abs(a) + abs(b)))

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 30), st.floats(-math.pi, math.pi))
    def test_fejer_positivity(self, n, c):
        # a nonnegative bump with a kink at c
        assume(abs(c) < math.pi - 1e-3)
        f = FunctionHandle(lambda t: np.maximum(0.0, 1 - np.abs(np.angle(np.exp(1j * (t - c))))),
                           domain=(-math.pi, math.pi), periodic=True)
        assert np.all(fejer_apply(f, n, TRIG_PROBES) >= -1e-12)
