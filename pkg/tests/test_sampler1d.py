import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from chebsampler.chebyshev import ChebSeries
from chebsampler.density import DensityFn
from chebsampler.errors import NegativeDensityError, NonFiniteError, ZeroMassError
from chebsampler.gof import QuadratureCdf, ks_test
from chebsampler.sampler1d import (
    bisection_steps,
    cdf_from_density,
    cdf_from_series,
    invert_cdf,
    sample_1d,
    sample_1d_from_cdf,
)


# shared by the hypothesis tests, which cannot take function-scoped fixtures
MIX_CDF = cdf_from_density(lambda x: np.exp(-x ** 2 / 2) * (1 + np.sin(3 * x) ** 2), (-8, 8))


@pytest.fixture(scope="module")
def gauss_cdf():
    return cdf_from_density(lambda x: np.exp(-x ** 2 / 2), (-8, 8))


class TestBisectionSteps:
    def test_default_tolerance(self):
        assert bisection_steps(1e-14) == 47

    @pytest.mark.parametrize("xtol", [1e-3, 1e-8, 3e-11, 1e-15])
    def test_matches_log2(self, xtol):
        # first k with 2**-k < xtol
        assert bisection_steps(xtol) == math.floor(-math.log2(xtol)) + 1

    def test_power_of_two(self):
        assert bisection_steps(2.0 ** -10) == 11

    @pytest.mark.parametrize("xtol", [0.0, 1.0, -1e-3])
    def test_rejects(self, xtol):
        with pytest.raises(ValueError):
            bisection_steps(xtol)


class TestCdf:
    def test_endpoints(self, gauss_cdf):
        assert float(gauss_cdf(-8.0)) == pytest.approx(0.0, abs=1e-15)
        assert float(gauss_cdf(8.0)) == pytest.approx(1.0, abs=1e-14)

    def test_against_normal_cdf(self, gauss_cdf):
        x = np.linspace(-8, 8, 201)
        ref = (special.ndtr(x) - special.ndtr(-8)) / (special.ndtr(8) - special.ndtr(-8))
        np.testing.assert_allclose(gauss_cdf(x), ref, atol=1e-14)

    def test_total_mass(self, gauss_cdf):
        assert gauss_cdf.total_mass == pytest.approx(math.sqrt(2 * math.pi) * special.erf(8 / math.sqrt(2)),
                                                      rel=1e-14)

    def test_pdf_normalized(self, gauss_cdf):
        assert float(gauss_cdf.pdf(0.0)) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-13)

    def test_negative_density(self):
        with pytest.raises(NegativeDensityError) as info:
            cdf_from_density(lambda x: x, (-1, 1))
        assert info.value.x == pytest.approx(-1.0)
        assert info.value.code == "NEGATIVE_DENSITY"

    def test_tiny_negative_ripple_tolerated(self):
        cdf = cdf_from_density(lambda x: np.exp(-x ** 2) - 1e-16, (-6, 6))
        assert cdf.total_mass > 0

    def test_zero_mass(self):
        with pytest.raises(ZeroMassError):
            cdf_from_density(lambda x: 0 * x, (0, 1))

    def test_zero_mass_series(self):
        with pytest.raises(ZeroMassError):
            cdf_from_series(ChebSeries((-1, 1), [0.0, 1.0]))

    def test_nonfinite(self):
        with pytest.raises(NonFiniteError), np.errstate(divide="ignore"):
            cdf_from_density(lambda x: 1 / x, (-1, 1))


class TestInvert:
    def test_iteration_count(self, gauss_cdf, rng):
        _, evals = invert_cdf(gauss_cdf, rng.random(1000), return_evals=True)
        assert np.all(evals == 47)

    def test_scalar(self, gauss_cdf):
        x, evals = invert_cdf(gauss_cdf, 0.5, return_evals=True)
        assert isinstance(x, float) and evals == 47
        assert x == pytest.approx(0.0, abs=1e-13)

    def test_roundtrip(self, gauss_cdf, rng):
        u = rng.random(500)
        x = invert_cdf(gauss_cdf, u)
        np.testing.assert_allclose(gauss_cdf(x), u, atol=1e-12)

    def test_uniform_density_is_affine(self):
        cdf = cdf_from_density(lambda x: np.ones_like(x), (2, 5))
        u = np.linspace(0, 1, 11)
        np.testing.assert_allclose(invert_cdf(cdf, u), 2 + 3 * u, atol=1e-13)

    def test_exponential_closed_form(self):
        lam = 3.0
        cdf = cdf_from_density(lambda x: np.exp(-lam * x), (0, 2))
        u = np.linspace(0.01, 0.99, 50)
        ref = -np.log1p(-u * (1 - math.exp(-2 * lam))) / lam
        np.testing.assert_allclose(invert_cdf(cdf, u), ref, atol=1e-13)

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
    def test_monotone(self, us):
        cdf = MIX_CDF
        u = np.sort(np.array(us))
        assert np.all(np.diff(invert_cdf(cdf, u)) >= 0)

    @given(st.floats(0, 1))
    def test_inside_interval(self, u):
        x = invert_cdf(MIX_CDF, u)
        assert -8 <= x <= 8

    @pytest.mark.parametrize("bad", [-0.1, 1.5, np.nan])
    def test_rejects_bad_u(self, gauss_cdf, bad):
        with pytest.raises(ValueError):
            invert_cdf(gauss_cdf, [0.2, bad])

    def test_shape_preserved(self, gauss_cdf):
        assert invert_cdf(gauss_cdf, np.full((3, 4), 0.25)).shape == (3, 4)


class TestSample:
    def test_deterministic(self, gauss_cdf):
        a = sample_1d_from_cdf(gauss_cdf, 100, 42)
        b = sample_1d_from_cdf(gauss_cdf, 100, 42)
        assert np.array_equal(a.points, b.points) and a.seed == 42

    def test_uniforms_recorded(self, gauss_cdf):
        batch = sample_1d_from_cdf(gauss_cdf, 50, 9)
        np.testing.assert_array_equal(batch.points, invert_cdf(gauss_cdf, batch.uniforms))

    def test_zero_samples(self, gauss_cdf):
        assert sample_1d_from_cdf(gauss_cdf, 0, 1).n == 0

    def test_negative_n(self, gauss_cdf):
        with pytest.raises(ValueError):
            sample_1d_from_cdf(gauss_cdf, -1)

    def test_no_evaluations_while_sampling(self):
        f = DensityFn(lambda x: 2 + np.cos(100 * x))
        cdf = cdf_from_density(f, (-1, 1))
        before = f.eval_count
        sample_1d_from_cdf(cdf, 10_000, 3)
        assert f.eval_count == before

    def test_ks_against_quadrature(self):
        f = lambda x: np.exp(-4 * x ** 2) * (9 + 72 * x ** 2 - 192 * x ** 4 + 512 * x ** 6)  # noqa: E731
        batch = sample_1d(f, (-4, 4), 20_000, 11)
        assert ks_test(batch.points, QuadratureCdf(f, -4, 4, cells=256)).passed
