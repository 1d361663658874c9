import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as npcheb
from scipy import integrate

from chebsampler.chebyshev import (
    DEFAULT_TOL,
    ChebSeries,
    _fast_coeffs,
    build_approximant,
    chebyshev_points,
    chop_length,
    clenshaw_eval,
    clenshaw_unit,
    coeffs_from_values,
    definite_integral,
    direct_coeffs,
    indefinite_integral,
    max_abs_on_grid,
)
from chebsampler.density import DensityFn, Interval
from chebsampler.errors import NonFiniteError, UnresolvedError


def trig_sum(c, t):
    """Reference: sum_k c_k cos(k arccos t)."""
    theta = np.arccos(np.clip(t, -1.0, 1.0))
    return np.cos(np.outer(theta, np.arange(len(c)))) @ c


coeff_lists = st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=40)


class TestPoints:
    def test_endpoints_and_order(self):
        x = chebyshev_points(8, (2.0, 5.0))
        assert x[0] == 5.0 and x[-1] == 2.0
        assert np.all(np.diff(x) < 0)

    def test_exact_symmetry(self):
        t = chebyshev_points(64)
        assert np.array_equal(t, -t[::-1])
        assert t[32] == 0.0

    def test_matches_formula(self):
        n = 16
        j = np.arange(n + 1)
        np.testing.assert_allclose(chebyshev_points(n, (-3, 1)), -1 + 2 * np.cos(j * np.pi / n),
                                   atol=1e-15)

    def test_rejects_n0(self):
        with pytest.raises(ValueError):
            chebyshev_points(0)


class TestTransforms:
    @pytest.mark.parametrize("n", [1, 2, 4, 8, 64, 512, 1024])
    def test_fast_matches_direct(self, n, rng):
        v = rng.standard_normal(n + 1)
        fast, direct = _fast_coeffs(v), direct_coeffs(v)
        assert np.max(np.abs(fast - direct)) <= 1e-13 * np.max(np.abs(direct))

    @pytest.mark.parametrize("n", [3, 10, 33])
    def test_interpolates_values(self, n, rng):
        v = rng.standard_normal(n + 1)
        s = coeffs_from_values(v)
        np.testing.assert_allclose(s(chebyshev_points(n)), v, atol=1e-13)

    def test_recovers_known_polynomial(self):
        c = np.array([0.5, -1.0, 0.25, 0.0, 2.0])
        x = chebyshev_points(16)
        np.testing.assert_allclose(_fast_coeffs(npcheb.chebval(x, c))[:5], c, atol=1e-15)

    @given(coeff_lists, st.floats(-1.0, 1.0))
    def test_clenshaw_matches_trig(self, c, t):
        c = np.array(c)
        got = clenshaw_unit(c, np.array([t]))
        assert abs(got[0] - trig_sum(c, np.array([t]))[0]) <= 1e-13 * max(1.0, np.abs(c).sum())

    @pytest.mark.parametrize("m", [3, 9, 50, 400])
    def test_clenshaw_kernel_matches_numpy(self, m, rng):
        c = rng.standard_normal(m)
        t = rng.uniform(-1, 1, 1000)
        np.testing.assert_allclose(clenshaw_unit(c, t), npcheb.chebval(t, c),
                                   atol=1e-13 * np.abs(c).sum())

    def test_clenshaw_scalar_and_shape(self):
        s = ChebSeries((0.0, 2.0), [1.0, 2.0])
        assert float(s(2.0)) == pytest.approx(3.0)
        assert s(np.zeros((2, 3))).shape == (2, 3)

    def test_clenshaw_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            clenshaw_eval(ChebSeries((-1, 1), [1.0]), [0.0, np.nan])

    @given(coeff_lists, coeff_lists, st.floats(-1, 1))
    def test_clenshaw_linear(self, a, b, t):
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        x = np.array([t])
        lhs = clenshaw_unit(a + b, x)
        assert lhs[0] == pytest.approx((clenshaw_unit(a, x) + clenshaw_unit(b, x))[0], abs=1e-12)


class TestChop:
    def test_unresolved_tail(self):
        assert chop_length(np.ones(20), 1e-10) is None

    def test_short_series_unresolved(self):
        assert chop_length([1.0, 0.0, 0.0], 1e-10) is None

    def test_cut_bounds_dropped_l1(self):
        c = np.array([1.0, 0.5, 1e-3, 1e-9, 1e-9, 0, 0, 0, 0, 0])
        keep = chop_length(c, 1e-8)
        assert keep == 3
        assert np.abs(c[keep:]).sum() <= 1e-8

    @given(st.lists(st.floats(0, 1), min_size=8, max_size=60), st.floats(1e-12, 1e-2))
    def test_truncation_error_bound(self, head, thr):
        c = np.concatenate([head, np.zeros(20)])
        keep = chop_length(c, thr)
        assert keep is not None
        assert np.abs(c[keep:]).sum() <= thr


class TestBuild:
    def test_polynomial_degree_exact(self):
        s = build_approximant(lambda x: 3 * x ** 5 - x + 2, (-2, 3))
        assert s.degree == 5
        x = np.linspace(-2, 3, 101)
        np.testing.assert_allclose(s(x), 3 * x ** 5 - x + 2, rtol=1e-13, atol=1e-11)

    def test_constant(self):
        f = DensityFn(lambda x: np.ones_like(x))
        s = build_approximant(f, (-1, 1))
        assert s.degree == 0 and s.coeffs[0] == pytest.approx(1.0)
        assert f.eval_count == 9

    def test_zero_function(self):
        s = build_approximant(lambda x: 0 * x, (0, 1))
        assert s.degree == 0 and s.coeffs[0] == 0.0

    def test_evaluation_count_is_final_grid(self):
        f = DensityFn(lambda x: np.exp(-x ** 2 / 2))
        s, values = build_approximant(f, (-8, 8), return_values=True)
        assert f.eval_count == values.size
        assert values.size - 1 in {2 ** k for k in range(3, 17)}
        assert s.degree < values.size

    @pytest.mark.parametrize("omega", [1, 30, 200])
    def test_sech_accuracy(self, omega):
        f = lambda x: 1 / np.cosh(omega * x)  # noqa: E731
        s = build_approximant(f, (-1, 1))
        x = np.linspace(-1, 1, 10_001)
        assert np.max(np.abs(s(x) - f(x))) <= 1e-12

    def test_unresolved(self):
        with pytest.raises(UnresolvedError):
            build_approximant(np.abs, (-1, 1), max_log2=8)

    def test_nonfinite(self):
        with pytest.raises(NonFiniteError), np.errstate(divide="ignore"):
            build_approximant(lambda x: 1 / x, (-1, 1))

    @pytest.mark.parametrize("tol", [0.0, 1e-16, 0.5])
    def test_tol_range(self, tol):
        with pytest.raises(ValueError):
            build_approximant(np.exp, (0, 1), tol)

    def test_default_tol(self):
        assert DEFAULT_TOL == pytest.approx(100 * 2.22e-16)


class TestIntegration:
    @given(coeff_lists, st.floats(-5, 5), st.floats(0.1, 10))
    def test_indefinite_matches_numpy(self, c, a, w):
        s = ChebSeries(Interval(a, a + w), c)
        F = indefinite_integral(s)
        x = np.linspace(a, a + w, 7)
        ref = npcheb.chebval(s.interval.to_unit(x), npcheb.chebint(c, lbnd=-1)) * w / 2
        np.testing.assert_allclose(F(x), ref, atol=1e-12 * max(1.0, w * np.abs(c).sum()))
        assert abs(float(F(a))) <= 1e-14 * max(1.0, w * np.abs(c).sum())

    @given(coeff_lists, st.floats(0.1, 10))
    def test_definite_matches_antiderivative(self, c, w):
        s = ChebSeries((0.0, w), c)
        assert definite_integral(s) == pytest.approx(float(indefinite_integral(s)(w)),
                                                     abs=1e-12 * max(1.0, w * np.abs(c).sum()))

    def test_definite_against_quad(self):
        s = build_approximant(lambda x: np.exp(-4 * x ** 2) * (9 + 72 * x ** 2), (-4, 4))
        ref = integrate.quad(lambda x: math.exp(-4 * x * x) * (9 + 72 * x * x), -4, 4,
                             epsabs=0, epsrel=1e-13)[0]
        assert s.integral() == pytest.approx(ref, rel=1e-12)

    def test_cumsum_derivative(self):
        s = ChebSeries((-1, 3), [0.3, -0.2, 0.1, 0.05])
        F = s.cumsum()
        x = np.linspace(-0.9, 2.9, 9)
        h = 1e-6
        np.testing.assert_allclose((F(x + h) - F(x - h)) / (2 * h), s(x), atol=1e-8)


class TestMaxAbs:
    def test_interior_peak(self):
        s = build_approximant(lambda x: np.exp(-(x - 0.3123) ** 2 * 50), (-1, 1))
        x, v = max_abs_on_grid(s)
        assert x == pytest.approx(0.3123, abs=1e-6)
        assert v == pytest.approx(1.0, abs=1e-13)

    def test_negative_extremum(self):
        s = ChebSeries((-1, 1), [0.0, -2.0])
        x, v = max_abs_on_grid(s)
        assert v == pytest.approx(2.0)
        assert abs(x) == pytest.approx(1.0)
