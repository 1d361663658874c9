import numpy as np
import pytest

from chebsampler.bench import (
    BENCH_HEADER,
    BenchRecord,
    evalcount,
    evalcount_csv,
    fitted_slope,
    format_table,
    histogram,
    records_to_csv,
    run_its,
    run_rs,
    run_suite,
    scaling_ratio,
)
from chebsampler.expr import compile_expr
from chebsampler.sampler1d import cdf_from_density
from chebsampler.suite import SUITE, SUITE_1D, SUITE_2D, SuiteEntry, select


class TestSuite:
    def test_eight_densities(self):
        assert len(SUITE_1D) == len(SUITE_2D) == 4
        assert all(e.ndim == 1 for e in SUITE_1D) and all(e.ndim == 2 for e in SUITE_2D)

    def test_select(self):
        assert select("all") == SUITE_1D + SUITE_2D
        assert [e.name for e in select("sech, quartic")] == ["sech", "quartic"]
        with pytest.raises(ValueError):
            select("nope")
        with pytest.raises(ValueError):
            select("")

    def test_density_counter_is_fresh(self):
        f = SUITE["sech"].density()
        f(np.zeros(3))
        assert SUITE["sech"].density().eval_count == 0

    def test_plain_matches_counted(self):
        e = SUITE["butterfly"]
        x, y = np.linspace(-3, 3, 7), np.linspace(-3, 3, 7)
        np.testing.assert_array_equal(e.plain()(x, y), e.density()(x, y))


class TestRecords:
    def test_csv_row(self):
        rec = BenchRecord("sech", "ITS", 10, 0.5, 0.25, 100, None, 0.01, True)
        assert rec.total_s == 0.75
        assert rec.csv_row() == "sech,ITS,10,0.5,0.25,0.75,100,,0.01,true"

    def test_error_row(self):
        rec = BenchRecord("bad", "RS", 10, error="NEGATIVE_DENSITY")
        assert rec.total_s is None
        assert rec.csv_row().endswith(",ERROR:NEGATIVE_DENSITY")

    def test_csv_and_table(self):
        recs = [BenchRecord("a", "ITS", 1, 1.0, 1.0, 5, 2, 0.5, False)]
        text = records_to_csv(recs)
        assert text.splitlines()[0] == BENCH_HEADER and text.endswith("false\n")
        assert format_table(recs).splitlines()[0].split() == BENCH_HEADER.split(",")


class TestRuns:
    def test_failure_recorded_and_suite_continues(self):
        bad = SuiteEntry("negative", "x", (-1.0, 1.0))
        recs = run_suite([bad, SUITE["oscillatory"]], n=500, seed=1, methods=("ITS",))
        assert recs[0].error == "NEGATIVE_DENSITY" and recs[0].evals is None
        assert recs[1].density == "oscillatory" and recs[1].gof_pass

    def test_sech_eval_economy(self):
        n = 10_000
        its, _ = run_its(SUITE["sech"], n, seed=0)
        rs = run_rs(SUITE["sech"], n, seed=0)
        assert its.gof_pass and rs.gof_pass
        assert rs.evals / n >= 50 * its.evals / n

    def test_quartic_rank(self):
        rec, lr = run_its(SUITE["quartic"], 2000, seed=0)
        assert rec.rank == 3 and lr.rank == 3 and rec.gof_pass
        rs = run_rs(SUITE["quartic"], 2000, seed=0, lr=lr)
        assert rs.gof_pass and rs.rank is None

    def test_methods_filter(self):
        recs = run_suite([SUITE["oscillatory"]], n=200, methods=("RS",))
        assert [r.method for r in recs] == ["RS"]


class TestEvalcount:
    def test_constant_its_and_slope(self):
        rows, slope = evalcount(lambda: compile_expr("2+cos(100*x)"), (-1, 1), [100, 1000, 4000], seed=3)
        assert len({r.evals_its for r in rows}) == 1
        assert slope == pytest.approx(3 * 2 / 4.0, rel=1e-2)
        assert fitted_slope(rows) == pytest.approx(slope, rel=0.1)
        assert evalcount_csv(rows).splitlines()[0] == "N,evals_ITS,evals_RS"

    def test_2d(self):
        rows, slope = evalcount(lambda: compile_expr("1+x*y"), ((0, 1), (0, 1)), [10, 20], seed=1)
        assert rows[0].evals_its == rows[1].evals_its
        assert slope == pytest.approx(2 / 1.25, rel=1e-6)


class TestHistogram:
    def test_counts_and_edges(self):
        h = histogram([0.1, 0.2, 0.9], bins=2, bounds=(0, 1))
        assert h.counts.tolist() == [2, 1] and h.n == 3 and h.pdf is None

    def test_overlay_expected_sums_to_n(self):
        x = np.random.default_rng(0).random(1000)
        h = histogram(x, bins=8, bounds=(0, 1), density=lambda t: np.ones_like(t))
        np.testing.assert_allclose(h.expected, 125.0, rtol=1e-12)
        np.testing.assert_allclose(h.pdf, 1.0, rtol=1e-12)

    def test_degenerate_range(self):
        h = histogram([2.0, 2.0], bins=3)
        assert h.edges[0] == 2.0 and h.edges[-1] == 3.0

    @pytest.mark.parametrize("samples,bins", [([], 5), ([1.0], 0)])
    def test_rejects(self, samples, bins):
        with pytest.raises(ValueError):
            histogram(samples, bins=bins)


class TestScaling:
    def test_ratio_positive(self):
        cdf = cdf_from_density(lambda x: np.exp(-x ** 2), (-5, 5))
        assert scaling_ratio(cdf, 1000, 2000, repeats=1) > 0
