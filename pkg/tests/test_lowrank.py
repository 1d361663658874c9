import numpy as np
import pytest
from scipy import integrate

from chebsampler.density import DensityFn
from chebsampler.errors import RankOverflowError, ZeroMassError, ZeroSliceError
from chebsampler.gof import marginal_density
from chebsampler.lowrank import (
    VALIDATION_FACTOR,
    _validation_error,
    aca_approximate,
    col_integrals,
    conditional_slice,
    evaluate_2d,
    marginal_x,
)
from chebsampler.suite import SUITE


def quartic(x, y):
    return np.exp(-x ** 4 / 2 - y ** 4 / 2) * (x - y) ** 2


def butterfly(x, y):
    return np.exp(-x ** 2 - 2 * y ** 2) / np.cosh(10 * x * y) * (x - y) ** 2


@pytest.fixture(scope="module")
def quartic_lr():
    return aca_approximate(quartic, ((-7, 7), (-7, 7)))


class TestRank:
    def test_separable(self):
        lr = aca_approximate(lambda x, y: np.exp(-x ** 2) * (1 + y ** 2), ((-2, 2), (-1, 1)))
        assert lr.rank == 1

    def test_sum_of_two(self):
        lr = aca_approximate(lambda x, y: np.cos(x) + np.sin(y) + 3, ((-1, 1), (-1, 1)))
        assert lr.rank == 2

    def test_quartic(self, quartic_lr):
        assert quartic_lr.rank == 3

    def test_bimodal(self):
        e = SUITE["bimodal"]
        assert aca_approximate(e.plain(), e.bounds).rank == 2

    def test_sigmas_nonincreasing(self, quartic_lr):
        assert np.all(np.diff(quartic_lr.sigmas) <= 0)
        assert np.all(quartic_lr.sigmas > 0)

    def test_rank_cap(self):
        with pytest.raises(RankOverflowError):
            aca_approximate(butterfly, ((-3, 3), (-3, 3)), max_rank=5)

    def test_zero(self):
        with pytest.raises(ZeroMassError):
            aca_approximate(lambda x, y: 0 * x * y, ((0, 1), (0, 1)))


class TestAccuracy:
    def test_quartic_pointwise(self, quartic_lr, rng):
        x, y = rng.uniform(-7, 7, (2, 2000))
        scale = quartic(0.0, 0.0) + 4.0
        err = np.max(np.abs(evaluate_2d(quartic_lr, x, y) - quartic(x, y)))
        assert err <= 1e-10 * scale

    def test_validation_residual(self, quartic_lr):
        f = DensityFn(quartic, 2)
        assert _validation_error(f, quartic_lr, 64) <= VALIDATION_FACTOR * 1e-12 * quartic_lr.scale

    def test_call_shapes(self, quartic_lr):
        assert isinstance(quartic_lr(0.5, 0.25), float)
        assert quartic_lr(np.zeros((3, 1)), np.zeros((1, 4))).shape == (3, 4)

    def test_on_grid_matches_pointwise(self, quartic_lr):
        xs, ys = np.linspace(-7, 7, 5), np.linspace(-7, 7, 6)
        np.testing.assert_allclose(quartic_lr.on_grid(xs, ys),
                                   evaluate_2d(quartic_lr, xs[:, None], ys[None, :]), atol=1e-14)

    def test_rejects_nonfinite_points(self, quartic_lr):
        with pytest.raises(ValueError):
            evaluate_2d(quartic_lr, [np.inf], [0.0])


class TestIntegrals:
    def test_marginal_against_quadrature(self, quartic_lr):
        ref = marginal_density(quartic, -7, 7)
        x = np.linspace(-7, 7, 31)
        np.testing.assert_allclose(marginal_x(quartic_lr)(x), ref(x), atol=1e-11)

    def test_total_mass(self, quartic_lr):
        ref = integrate.dblquad(lambda y, x: quartic(x, y), -7, 7, -7, 7, epsabs=1e-12)[0]
        assert marginal_x(quartic_lr).integral() == pytest.approx(ref, rel=1e-9)

    def test_col_integrals_length(self, quartic_lr):
        assert col_integrals(quartic_lr).shape == (3,)

    def test_butterfly_slice_at_zero(self):
        lr = aca_approximate(butterfly, ((-3, 3), (-3, 3)))
        series, mass = conditional_slice(lr, 0.0)
        y = np.linspace(-3, 3, 100)
        ref = np.exp(-2 * y ** 2) * y ** 2
        ref_mass = integrate.quad(lambda t: np.exp(-2 * t * t) * t * t, -3, 3, epsabs=0, epsrel=1e-13)[0]
        np.testing.assert_allclose(series(y) / mass, ref / ref_mass, rtol=1e-8, atol=1e-8 * ref.max())

    def test_zero_slice(self):
        lr = aca_approximate(lambda x, y: x ** 2 * (1 + y ** 2), ((-1, 1), (-1, 1)))
        with pytest.raises(ZeroSliceError):
            conditional_slice(lr, 0.0)
