import numpy as np
import pytest

from meandim.config import config
from meandim.metric.covering import (
    covering_number,
    sandwich_check,
    separating_number,
    tame_growth_profile,
    tame_transform,
)
from meandim.metric.space import Cover, FiniteMetricSpace, validate_metric
from meandim.utils import CapacityError, DomainError, StructuralError


class TestValidateMetric:
    def test_valid_pair(self, two_points):
        assert validate_metric(two_points) == []

    def test_asymmetric_distance(self):
        space = FiniteMetricSpace(("a", "b"), [[0.0, 1.0], [2.0, 0.0]])
        violations = validate_metric(space)
        assert [(v.axiom, v.indices) for v in violations] == [("symmetry", (0, 1))]

    def test_triangle_violation(self):
        dist = [[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]]
        violations = validate_metric(FiniteMetricSpace(("a", "b", "c"), dist))
        assert len(violations) == 1
        assert violations[0].axiom == "triangle"
        assert violations[0].indices == (0, 1, 2)
        assert violations[0].excess == pytest.approx(1.0)

    def test_zero_distance_between_distinct_points(self):
        space = FiniteMetricSpace(("a", "b"), np.zeros((2, 2)))
        assert [v.axiom for v in validate_metric(space)] == ["positivity"]

    def test_random_sup_metrics_are_valid(self, rng, make_space):
        for n in (1, 2, 5, 9):
            assert validate_metric(make_space(rng, n)) == []


class TestFiniteMetricSpace:
    def test_non_square_matrix(self):
        with pytest.raises(StructuralError):
            FiniteMetricSpace(("a", "b"), np.zeros((2, 3)))

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            FiniteMetricSpace(("a",), np.zeros((2, 2)))

    def test_dict_round_trip_keeps_distances(self, harmonic_three):
        restored = FiniteMetricSpace.from_dict(harmonic_three.to_dict())
        assert restored.points == harmonic_three.points
        np.testing.assert_array_equal(restored.dist, harmonic_three.dist)

    def test_from_dict_missing_field(self):
        with pytest.raises(StructuralError):
            FiniteMetricSpace.from_dict({"points": ["a"]})

    def test_diameter_and_subspace(self, harmonic_three):
        assert harmonic_three.diameter == pytest.approx(1.0)
        sub = harmonic_three.subspace([1, 2])
        assert sub.size == 2
        assert sub.diameter == pytest.approx(1 / 6)

    def test_compatibility_is_strict(self):
        space = FiniteMetricSpace.from_values([0.0, 0.5])
        assert not space.compatibility(0.5)[0, 1]
        assert space.compatibility(0.5 + 1e-6)[0, 1]


class TestCoveringNumbers:
    def test_two_points(self, two_points):
        assert covering_number(two_points, 0.5).count == 2
        assert covering_number(two_points, 1.5).count == 1

    def test_harmonic_three(self, harmonic_three):
        result = covering_number(harmonic_three, 0.2)
        assert result.count == 3
        assert result.cover.covers(4)
        assert all(d < 0.2 for d in result.cover.diameters)
        assert separating_number(harmonic_three, 0.2).count == 3

    def test_separating_two_points_and_singleton(self, two_points):
        assert separating_number(two_points, 0.5).count == 2
        single = FiniteMetricSpace(("x",), [[0.0]])
        assert separating_number(single, 0.1).count == 1

    def test_distance_equal_to_eps_is_not_compatible(self):
        assert covering_number(FiniteMetricSpace.from_values([0.0, 0.5]), 0.5).count == 2

    def test_nonpositive_eps(self, two_points):
        with pytest.raises(DomainError):
            covering_number(two_points, 0.0)

    def test_unknown_mode(self, two_points):
        with pytest.raises(StructuralError):
            covering_number(two_points, 0.5, mode="fast")

    def test_exact_mode_budget(self, rng, make_space):
        space = make_space(rng, config.EXACT_POINT_BUDGET + 1)
        with pytest.raises(CapacityError, match="EXACT_POINT_BUDGET"):
            covering_number(space, 0.3, mode="exact")
        assert covering_number(space, 0.3, mode="auto").mode == "greedy"

    def test_budget_follows_config(self, harmonic_three):
        config.EXACT_POINT_BUDGET = 3
        with pytest.raises(CapacityError):
            covering_number(harmonic_three, 0.2, mode="exact")

    def test_greedy_is_an_upper_bound(self, rng, make_space):
        for _ in range(30):
            space = make_space(rng, int(rng.integers(2, 12)))
            eps = float(rng.uniform(0.1, 0.8))
            exact = covering_number(space, eps, "exact")
            greedy = covering_number(space, eps, "greedy")
            assert greedy.count >= exact.count
            assert greedy.cover.covers(space.size)
            assert max(greedy.cover.diameters) < eps
            assert separating_number(space, eps, "greedy").count <= separating_number(space, eps, "exact").count

    def test_sandwich_on_random_spaces(self, rng, make_space):
        for _ in range(200):
            space = make_space(rng, int(rng.integers(1, 13)))
            eps = float(rng.uniform(0.1, 0.8))
            delta = eps * float(rng.uniform(0.05, 0.49))
            assert sandwich_check(space, eps, delta).holds

    def test_sandwich_needs_small_delta(self, two_points):
        with pytest.raises(DomainError):
            sandwich_check(two_points, 0.5, 0.25)


class TestTaming:
    def test_tamed_metric_is_valid_and_dominated(self, rng, make_space):
        space = make_space(rng, 8)
        tamed = tame_transform(space)
        assert validate_metric(tamed) == []
        assert (tamed.dist <= space.dist + 1e-12).all()

    def test_single_point(self):
        tamed = tame_transform(FiniteMetricSpace(("x",), [[0.0]]))
        assert tamed.dist[0, 0] == 0.0

    def test_growth_profile_on_a_line(self):
        line = FiniteMetricSpace.from_values(np.linspace(0.0, 1.0, 9))
        report = tame_growth_profile(line, [0.125, 0.5, 0.25], delta=1.0)
        assert [p["epsilon"] for p in report.points] == [0.5, 0.25, 0.125]
        assert [p["count"] for p in report.points] == [3, 5, 9]
        assert report.nonincreasing

    def test_growth_profile_needs_positive_delta(self, two_points):
        with pytest.raises(DomainError):
            tame_growth_profile(two_points, [0.5], delta=0.0)


def test_cover_from_blocks_records_diameters(harmonic_three):
    cover = Cover.from_blocks(harmonic_three, [[2, 1], [0], [3]])
    assert cover.blocks[0] == (1, 2)
    assert cover.diameters[0] == pytest.approx(1 / 6)
    assert len(cover) == 3 and cover.covers(4)
