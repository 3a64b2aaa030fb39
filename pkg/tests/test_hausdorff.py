import numpy as np
import pytest

from meandim.hausdorff import (
    candidate_blocks,
    dim_profile,
    frostman_measure,
    frostman_threshold,
    hausdorff_content,
    lemma_inequality_check,
    mean_hausdorff_estimate,
    quantitative_frostman,
    solve_content_lp,
    verify_scaling_law,
    weighted_content,
)
from meandim.metric.space import FiniteMetricSpace
from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.orbit import orbit_metric
from meandim.systems.shift import build_full_shift
from meandim.utils import CapacityError, DomainError, StructuralError


def uniform_space(n, distance):
    dist = np.full((n, n), distance)
    np.fill_diagonal(dist, 0.0)
    return FiniteMetricSpace(tuple(str(i) for i in range(n)), dist)


class TestContent:
    def test_singletons_are_free_without_tau(self, two_points):
        assert hausdorff_content(two_points, 1.0, 2.0, 0.0).value == 0.0

    def test_tau_charges_every_block(self, two_points):
        for mode in ("exact", "greedy"):
            result = hausdorff_content(two_points, 1.0, 2.0, 0.1, mode)
            assert result.value == pytest.approx(0.2)
            assert len(result.cover) == 2

    def test_s_zero_counts_blocks(self, harmonic_three):
        assert hausdorff_content(harmonic_three, 0.0, 0.2).value == 3.0

    def test_greedy_bounds_exact(self, rng, make_space):
        for _ in range(25):
            space = make_space(rng, int(rng.integers(2, 10)))
            s, eps, tau = float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.2, 0.8)), float(rng.uniform(0, 0.1))
            exact = hausdorff_content(space, s, eps, tau, "exact")
            greedy = hausdorff_content(space, s, eps, tau, "greedy")
            assert greedy.value >= exact.value - 1e-12
            assert exact.cover.covers(space.size)

    def test_negative_parameters(self, two_points):
        with pytest.raises(DomainError):
            hausdorff_content(two_points, -1.0, 0.5)


class TestDimProfile:
    def test_uniform_space(self):
        profile = dim_profile(uniform_space(16, 0.5), 0.4, 0.25)
        assert profile.value == pytest.approx(2.0, abs=1e-6)
        assert profile.content_at_zero == 16.0

    def test_single_point(self):
        single = FiniteMetricSpace(("x",), [[0.0]])
        assert dim_profile(single, 0.5, 0.1).value < 1e-5

    def test_needs_small_diameter(self, two_points):
        with pytest.raises(DomainError, match="rescale"):
            dim_profile(two_points, 0.5, 0.1)

    def test_eps_must_exceed_tau(self):
        with pytest.raises(DomainError):
            dim_profile(FiniteMetricSpace.from_values([0.0, 0.5]), 0.1, 0.2)

    def test_monotone_in_eps(self, harmonic_three):
        space = harmonic_three.scaled(0.5)
        values = [dim_profile(space, eps, 0.01).value for eps in (0.45, 0.2, 0.1, 0.05)]
        assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


class TestWeightedContent:
    def test_fractional_cover_value(self, two_points):
        lp = solve_content_lp(two_points, 1.0, 2.0, 0.1)
        assert lp.primal_value == pytest.approx(0.2)
        assert lp.gap < 1e-8
        cover = weighted_content(two_points, 1.0, 2.0, 0.1)
        assert cover.blocks == ((0,), (1,))
        assert cover.weights == pytest.approx((1.0, 1.0))

    def test_single_point_costs_nothing(self):
        assert solve_content_lp(FiniteMetricSpace(("x",), [[0.0]]), 1.0, 0.5).primal_value == pytest.approx(0.0)

    def test_s_zero_is_fractional_cover_number(self, two_points):
        assert solve_content_lp(two_points, 0.0, 2.0).primal_value == pytest.approx(1.0)

    def test_block_families(self, two_points):
        blocks, family = candidate_blocks(two_points, 2.0, "all-subsets")
        assert family == "all-subsets"
        assert sorted(blocks) == [(0,), (0, 1), (1,)]
        balls, _ = candidate_blocks(two_points, 2.0, "balls")
        assert balls == [(0,), (1,), (0, 1)]
        assert candidate_blocks(two_points, 0.5)[0] == [(0,), (1,)]

    def test_family_errors(self, two_points):
        with pytest.raises(StructuralError):
            candidate_blocks(two_points, 1.0, "cubes")
        with pytest.raises(CapacityError):
            candidate_blocks(uniform_space(16, 0.5), 1.0, "all-subsets")

    def test_weighted_below_hausdorff(self, rng, make_space):
        for _ in range(25):
            space = make_space(rng, int(rng.integers(2, 10)))
            s, delta, tau = float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.2, 0.8)), float(rng.uniform(0, 0.1))
            lp = solve_content_lp(space, s, delta, tau, "all-subsets")
            assert lp.primal_value <= hausdorff_content(space, s, delta, tau, "exact").value + 1e-9
            assert lp.gap <= 1e-7


class TestFrostman:
    def test_two_points(self, two_points):
        cert = frostman_measure(two_points, 1.0, 2.0, 0.1)
        np.testing.assert_allclose(cert.measure, [0.1, 0.1], atol=1e-9)
        assert cert.mass == pytest.approx(0.2)
        assert cert.valid
        np.testing.assert_allclose(cert.probability(), [0.5, 0.5])

    def test_single_point_has_no_mass(self):
        cert = frostman_measure(FiniteMetricSpace(("x",), [[0.0]]), 1.0, 0.5)
        assert cert.mass == pytest.approx(0.0)
        np.testing.assert_allclose(cert.probability(), [1.0])

    def test_scaling_law_failure_is_reported(self):
        space = FiniteMetricSpace.from_values([0.0, 2.0])
        report = verify_scaling_law(space, [1.0, 0.0], 1.0, 1.0, 0.0)
        assert not report.passed
        assert report.worst_margin == pytest.approx(-1.0)
        assert report.witness == (0,)

    def test_scaling_law_shape_check(self, two_points):
        with pytest.raises(DomainError):
            verify_scaling_law(two_points, [1.0], 1.0, 1.0)

    def test_random_spaces(self, rng, make_space):
        for _ in range(100):
            space = make_space(rng, int(rng.integers(1, 13)))
            s = float(rng.uniform(0.2, 2.0))
            delta = float(rng.uniform(0.2, 0.8))
            tau = float(rng.uniform(0.0, 0.1))
            cert = frostman_measure(space, s, delta, tau)
            assert cert.valid
            assert cert.mass == pytest.approx(solve_content_lp(space, s, delta, tau).primal_value, abs=1e-7)
            assert lemma_inequality_check(space, s, delta / 6).holds

    def test_lemma_on_block_counts(self, rng, make_space):
        for _ in range(50):
            space = make_space(rng, int(rng.integers(1, 13)))
            report = lemma_inequality_check(space, 0.0, float(rng.uniform(0.05, 0.15)))
            assert report.holds
            assert report.content_6delta >= 1.0


class TestQuantitativeFrostman:
    def test_threshold(self):
        assert frostman_threshold(0.5) == pytest.approx(1 / 36)
        with pytest.raises(DomainError):
            frostman_threshold(1.0)

    def test_probability_measure_on_a_grid(self):
        space = FiniteMetricSpace.from_values(np.arange(12) * 0.01, label="grid")
        report = quantitative_frostman(space, 0.5, 1 / 36, 1e-3)
        assert report.dimension > 0
        assert report.s == pytest.approx(0.5 * report.dimension)
        assert report.probability.sum() == pytest.approx(1.0)
        assert report.scaling.passed

    def test_delta_above_threshold(self, two_points):
        with pytest.raises(DomainError):
            quantitative_frostman(two_points, 0.5, 0.1)


class TestMeanHausdorff:
    def test_singleton_alphabet(self):
        system = build_full_shift(AlphabetSpec.interval(1), W=1)
        estimate = mean_hausdorff_estimate(system, [0.5, 0.25], [1, 2], tau=0.01)
        assert estimate.value < 1e-5

    def test_rows_match_direct_profiles(self, binary_shift):
        tau = 1e-3
        estimate = mean_hausdorff_estimate(binary_shift, [1.5, 0.75], [1, 2], tau=tau, mode="greedy")
        frame = estimate.to_frame()
        for row in frame.to_dict(orient="records"):
            space = orbit_metric(binary_shift, row["N"], "max")
            scale = (1 - tau) / space.diameter
            assert row["scale"] == pytest.approx(scale)
            direct = dim_profile(space.scaled(scale), row["epsilon"] * scale, tau, "greedy").value
            assert row["dim"] == pytest.approx(direct)
            assert row["value"] == pytest.approx(direct / row["N"])
            assert row["metric"] == "max"

    def test_only_eps_is_rescaled(self, binary_shift):
        tau = 0.01
        estimate = mean_hausdorff_estimate(binary_shift, [0.75], [2], tau=tau, mode="greedy")
        row, = estimate.to_frame().to_dict(orient="records")
        assert row["scale"] < 1
        assert row["scaled_epsilon"] == pytest.approx(0.75 * row["scale"])
        assert row["tau"] == tau
        space = orbit_metric(binary_shift, 2, "max").scaled(row["scale"])
        assert row["dim"] == pytest.approx(dim_profile(space, row["scaled_epsilon"], tau, "greedy").value)

    def test_plateau_grows_as_eps_shrinks(self, binary_shift):
        estimate = mean_hausdorff_estimate(binary_shift, [1.5, 0.75, 0.3], [1], tau=1e-3, mode="exact")
        assert estimate.monotone
        assert list(estimate.plateau.index) == [1.5, 0.75, 0.3]

    def test_argument_errors(self, binary_shift):
        with pytest.raises(DomainError):
            mean_hausdorff_estimate(binary_shift, [], [1])
        with pytest.raises(DomainError):
            mean_hausdorff_estimate(binary_shift, [0.5], [1], tau=1.0)
