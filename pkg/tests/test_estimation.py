import math

import numpy as np
import pytest

from meandim.estimation.profiles import covering_profile, covering_sample, metric_mean_dimension_estimate
from meandim.estimation.slope import estimate_dimension, fit_slope
from meandim.utils import DomainError, StructuralError

EPS = [0.5, 0.25, 0.125, 0.0625]


def rows_for(fn, eps_grid=EPS, ns=(1, 2, 3)):
    return [{"epsilon": e, "N": n, "value": fn(e, n)} for n in ns for e in eps_grid]


class TestFitSlope:
    def test_exact_line(self):
        fit = fit_slope(EPS, [2 * math.log2(1 / e) + 1 for e in EPS])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.ci_low == pytest.approx(2.0) and fit.ci_high == pytest.approx(2.0)

    def test_flat_curve(self):
        fit = fit_slope(EPS, np.zeros(4))
        assert fit.slope == pytest.approx(0.0)

    def test_eps_at_least_one_dropped(self):
        fit = fit_slope([2.0, 1.0, 0.5, 0.25], [5.0, 5.0, 1.0, 2.0])
        assert fit.n_points == 2
        assert fit.slope == pytest.approx(1.0)

    def test_needs_two_scales(self):
        with pytest.raises(DomainError):
            fit_slope([0.5], [1.0])
        with pytest.raises(DomainError):
            fit_slope([0.5, 0.5], [1.0, 2.0])

    def test_noisy_interval_contains_slope(self, rng):
        eps = np.exp2(-np.arange(1, 9))
        values = 1.5 * np.log2(1 / eps) + rng.normal(0, 0.01, size=8)
        fit = fit_slope(eps, values)
        assert fit.ci_low < fit.slope < fit.ci_high
        assert fit.slope == pytest.approx(1.5, abs=0.05)


class TestEstimateDimension:
    def test_headlines(self):
        # block rate N*value = (N + 1) log2(1/eps): per-N slopes (N+1)/N, increments exactly 1
        rows = rows_for(lambda e, n: (n + 1) * math.log2(1 / e) / n)
        estimate = estimate_dimension(rows, "S")
        assert estimate.max_n.slope == pytest.approx(4 / 3)
        assert estimate.per_n[1].slope == pytest.approx(2.0)
        assert estimate.envelope.slope == pytest.approx(4 / 3)
        assert estimate.increment.slope == pytest.approx(1.0)
        assert estimate_dimension(rows, "S", headline="increment").slope == pytest.approx(1.0)

    def test_single_depth_has_no_increment(self):
        estimate = estimate_dimension(rows_for(lambda e, n: math.log2(1 / e), ns=(2,)), "R",
                                      headline="increment")
        assert estimate.increment is None
        assert estimate.slope == pytest.approx(1.0)

    def test_needs_three_scales(self):
        rows = rows_for(lambda e, n: 1.0, eps_grid=[0.5, 0.25])
        with pytest.raises(DomainError):
            estimate_dimension(rows, "S")

    def test_needs_an_octave(self):
        rows = rows_for(lambda e, n: 1.0, eps_grid=[0.5, 0.45, 0.4])
        with pytest.raises(DomainError, match="octave"):
            estimate_dimension(rows, "S")

    def test_unknown_headline(self):
        with pytest.raises(DomainError):
            estimate_dimension(rows_for(lambda e, n: 1.0), "S", headline="best")

    def test_report_is_serializable(self):
        estimate = estimate_dimension(rows_for(lambda e, n: math.log2(1 / e)), "S", truncation_error=0.25)
        data = estimate.to_dict()
        assert data["slope"] == pytest.approx(1.0)
        assert data["truncation_error"] == 0.25
        assert set(data["per_n"]) == {"1", "2", "3"}


class TestCoveringProfile:
    def test_rows_ordered_by_depth_then_decreasing_eps(self, binary_shift):
        rows = covering_profile(binary_shift, [0.25, 1.5, 0.75], [2, 1])
        assert [(r["N"], r["epsilon"]) for r in rows] == [
            (1, 1.5), (1, 0.75), (1, 0.25), (2, 1.5), (2, 0.75), (2, 0.25)]
        assert all(r["metric"] == "max" for r in rows)

    def test_counts_on_binary_shift(self, binary_shift):
        row = covering_sample(binary_shift, 0.25, 1, "max", "exact")
        assert row["log2_count"] == pytest.approx(3.0)
        assert row["value"] == pytest.approx(3.0)
        assert covering_sample(binary_shift, 2.5, 1)["log2_count"] == 0.0

    def test_values_decrease_with_eps(self, binary_shift):
        rows = covering_profile(binary_shift, [1.5, 0.75, 0.25], [1, 2], mode="exact")
        for N in (1, 2):
            values = [r["value"] for r in rows if r["N"] == N]
            assert values == sorted(values)

    def test_product_mode_bounds_exact(self, binary_shift):
        for eps in (0.75, 1.5):
            exact = covering_sample(binary_shift, eps, 2, "max", "exact")
            product = covering_sample(binary_shift, eps, 2, "max", "product")
            assert product["log2_count"] >= exact["log2_count"] - 1e-12
            assert product["mode"] == "product"

    def test_errors(self, binary_shift):
        with pytest.raises(DomainError):
            covering_profile(binary_shift, [], [1])
        with pytest.raises(StructuralError):
            covering_sample(binary_shift, 0.5, 1, mode="sampled")

    def test_estimate_records_truncation(self, binary_shift):
        samples = covering_profile(binary_shift, [0.75, 0.5, 0.25, 0.125], [1, 2])
        estimate = metric_mean_dimension_estimate(samples, "max_n", binary_shift)
        assert estimate.truncation_error == pytest.approx(binary_shift.truncation_error())
        assert estimate.slope >= 0.0
