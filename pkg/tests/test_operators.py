import math

import numpy as np
import pytest
from oracles import fejer_via_partial_sums, kantorovich_direct, second_central_symbolic

from korovkin.errors import InvalidOperator
from korovkin.funcspace import PERIODIC_INTERVAL, FunctionHandle, constant
from korovkin.library import abs_shift, monomial, smooth_step, sqrt, trig_cos, trig_sin
from korovkin.operators import (
    OperatorSpec,
    apply,
    bernstein_basis,
    binomial_row,
    fejer_apply,
    fejer_kernel,
    fejer_transform,
    image,
    kantorovich_apply,
    kantorovich_cell_integrals,
    kantorovich_moment1,
    kantorovich_moment2,
    kantorovich_second_central,
    kantorovich_second_central_expanded,
)

PROBES = np.linspace(0.0, 1.0, 33)


def t_pow(k):
    return FunctionHandle(lambda t: np.asarray(t, float) ** k, name=f"t^{k}")


class TestBinomials:
    @pytest.mark.parametrize("n", [1, 7, 60, 61, 200, 1000])
    def test_basis_is_partition_of_unity(self, n):
        b = bernstein_basis(n, np.linspace(0, 1, 101))
        assert b.shape == (101, n + 1)
        np.testing.assert_allclose(b.sum(axis=1), 1.0, atol=1e-12)

    @pytest.mark.parametrize("n", [5, 30, 60])
    def test_row_matches_exact(self, n):
        np.testing.assert_allclose(binomial_row(n), [math.comb(n, k) for k in range(n + 1)], rtol=1e-14)

    def test_basis_against_exact_beyond_recurrence(self):
        n, x = 120, 0.37
        b = np.ravel(bernstein_basis(n, np.array([x])))
        exact = [math.comb(n, k) * x**k * (1 - x) ** (n - k) for k in range(n + 1)]
        np.testing.assert_allclose(b, exact, rtol=1e-9, atol=1e-300)


class TestKantorovich:
    def test_examples(self):
        assert kantorovich_apply(constant(1.0), 7, 0.3) == pytest.approx(1.0, abs=1e-14)
        assert kantorovich_apply(t_pow(1), 1, 0.0) == pytest.approx(0.25, abs=1e-14)
        assert kantorovich_apply(t_pow(2), 2, 0.5) == pytest.approx(8.5 / 27, abs=1e-14)

    def test_moment_formulas(self):
        assert kantorovich_moment1(1, 0.0) == 0.25
        assert kantorovich_moment1(5, 1.0) == pytest.approx(11 / 12)
        assert kantorovich_moment1(37, 0.5) == 0.5
        assert kantorovich_moment2(1, 0.0) == pytest.approx(1 / 12)
        assert kantorovich_moment2(1, 1.0) == pytest.approx(7 / 12)
        assert kantorovich_moment2(2, 0.5) == pytest.approx(8.5 / 27)

    def test_second_central_simplification_symbolic(self):
        _, _, diff = second_central_symbolic()
        assert diff == 0

    @pytest.mark.parametrize("n", [1, 2, 5, 10, 50, 1000])
    def test_second_central_forms_agree(self, n):
        np.testing.assert_allclose(
            kantorovich_second_central(n, PROBES), kantorovich_second_central_expanded(n, PROBES), atol=1e-14
        )

    def test_second_central_examples(self):
        np.testing.assert_allclose(kantorovich_second_central(1, PROBES), 1 / 12, atol=1e-15)
        for n in (1, 4, 9):
            assert kantorovich_second_central(n, 0.0) == pytest.approx(1 / (3 * (n + 1) ** 2))

    @pytest.mark.parametrize("n", [1, 3, 8])
    def test_second_central_matches_operator(self, n):
        for x in (0.0, 0.3, 1.0):
            g = FunctionHandle(lambda t, x=x: (x - t) ** 2)
            assert kantorovich_apply(g, n, x) == pytest.approx(kantorovich_second_central(n, x), abs=1e-13)

    @pytest.mark.parametrize("f", [sqrt(), abs_shift(0.5), smooth_step()], ids=lambda f: f.name)
    @pytest.mark.parametrize("n", [1, 6, 25])
    def test_against_direct_sum(self, f, n):
        for x in (0.0, 0.21, 0.5, 0.9):
            assert kantorovich_apply(f, n, x) == pytest.approx(kantorovich_direct(f, n, x), abs=1e-10)

    @pytest.mark.parametrize("f", [sqrt(), abs_shift(0.3), monomial(3), smooth_step()], ids=lambda f: f.name)
    @pytest.mark.parametrize("n", [2, 10, 40])
    def test_positivity(self, f, n):
        assert np.all(kantorovich_apply(f, n, PROBES) >= -1e-10)

    @pytest.mark.parametrize("n", [1, 5, 20, 100])
    def test_cauchy_schwarz(self, n):
        for x in PROBES:
            g = FunctionHandle(lambda t, x=x: np.abs(t - x), breakpoints=(x,))
            assert kantorovich_apply(g, n, x) <= math.sqrt(kantorovich_second_central(n, x)) + 1e-9

    def test_linearity(self):
        f, g = sqrt(), smooth_step()
        for a, b in [(2.0, -1.0), (0.5, 3.0)]:
            lhs = kantorovich_apply(a * f + b * g, 9, PROBES)
            rhs = a * kantorovich_apply(f, 9, PROBES) + b * kantorovich_apply(g, 9, PROBES)
            np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_cell_integrals_are_cached_and_read_only(self):
        f = sqrt()
        a = kantorovich_cell_integrals(f, 12)
        b = kantorovich_cell_integrals(f, 12)
        assert a is b
        with pytest.raises(ValueError):
            a[0] = 1.0

    def test_rejects_points_outside(self):
        with pytest.raises(ValueError):
            kantorovich_apply(t_pow(1), 3, 1.5)


class TestFejer:
    def test_kernel_mean_and_peak(self):
        u = np.linspace(-math.pi, math.pi, 200001)
        for n in (1, 4, 9):
            vals = fejer_kernel(u, n)
            assert np.trapezoid(vals, u) / (2 * math.pi) == pytest.approx(1.0, abs=1e-6)
            assert fejer_kernel(np.array([0.0, 1e-9]), n) == pytest.approx([n + 1, n + 1], rel=1e-9)
            assert np.all(vals >= 0)

    @pytest.mark.parametrize("n", [1, 4, 8, 16])
    def test_cos_sin_eigenvalues(self, n):
        x = np.linspace(-math.pi, math.pi, 41)
        np.testing.assert_allclose(fejer_apply(trig_cos(), n, x), n / (n + 1) * np.cos(x), atol=1e-10)
        np.testing.assert_allclose(fejer_apply(trig_sin(), n, x), n / (n + 1) * np.sin(x), atol=1e-10)

    def test_higher_harmonic(self):
        n = 6
        x = np.linspace(-math.pi, math.pi, 17)
        np.testing.assert_allclose(fejer_apply(trig_cos(2), n, x), (1 - 2 / (n + 1)) * np.cos(2 * x), atol=1e-10)
        np.testing.assert_allclose(fejer_apply(trig_cos(9), n, x), 0.0, atol=1e-10)

    @pytest.mark.parametrize("n", [3, 7])
    def test_sin_squared_moment(self, n):
        x = np.linspace(-math.pi, math.pi, 9)
        vals = fejer_transform(lambda xs, t: np.sin(0.5 * (xs - t)) ** 2, n, x)
        np.testing.assert_allclose(vals, 1 / (2 * (n + 1)), atol=1e-12)

    def test_against_partial_sums(self):
        f = FunctionHandle(lambda t: np.abs(np.sin(t)) ** 3, domain=PERIODIC_INTERVAL, periodic=True)
        for x in (-2.0, 0.3, 3.0):
            assert fejer_apply(f, 5, x) == pytest.approx(fejer_via_partial_sums(f, 5, x), abs=1e-9)

    def test_requires_periodic(self):
        with pytest.raises(ValueError):
            fejer_apply(t_pow(1), 3, 0.0)


class TestDispatch:
    def test_apply_examples(self):
        assert apply(OperatorSpec.kantorovich(3), constant(1.0), 0.2) == pytest.approx(1.0, abs=1e-14)
        one_p = constant(1.0, PERIODIC_INTERVAL, periodic=True)
        assert apply(OperatorSpec.fejer(4), one_p, 0.0) == pytest.approx(1.0, abs=1e-12)
        ident = OperatorSpec.custom(lambda f, x: f(x), unital=True, name="identity")
        f = sqrt()
        assert apply(ident, f, 0.49) == pytest.approx(0.7)

    def test_image_handle(self):
        op = OperatorSpec.kantorovich(4)
        g = image(op, t_pow(1))
        assert g(0.0) == pytest.approx(kantorovich_moment1(4, 0.0))

    def test_custom_positivity_probe(self):
        with pytest.raises(InvalidOperator):
            OperatorSpec.custom(lambda f, x: -f(x))

    def test_invalid_n(self):
        with pytest.raises(InvalidOperator):
            OperatorSpec.kantorovich(0)
        with pytest.raises(InvalidOperator):
            OperatorSpec.fejer(2.5)

    def test_with_n_and_domains(self):
        op = OperatorSpec.fejer(3).with_n(9)
        assert op.n == 9 and op.periodic and op.domain == PERIODIC_INTERVAL
        assert OperatorSpec.kantorovich(2).is_unital
