import math

import numpy as np
import pytest

from meandim.ergodic import (
    cylinder_distance,
    invariance_defect,
    nice_measure_pipeline,
    optimal_coupling,
    pushforward_average,
    shift_words,
)
from meandim.ergodic.averaging import central_positions
from meandim.ergodic.pipeline import NiceMeasurePipeline
from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.measures import delta_measure, product_measure
from meandim.systems.orbit import orbit_metric
from meandim.systems.shift import build_full_shift
from meandim.utils import DomainError, StructuralError


class TestShiftAveraging:
    def test_shift_fills_the_tail(self):
        words = np.array([[1, 2, 3], [4, 5, 6]])
        assert shift_words(words, 1).tolist() == [[2, 3, 0], [5, 6, 0]]
        assert shift_words(words, 3).tolist() == [[0, 0, 0], [0, 0, 0]]
        assert shift_words(words, 0) is words

    def test_single_term_is_the_identity(self, binary_shift):
        nu = delta_measure(binary_shift, [1, 0, 1])
        averaged = pushforward_average(binary_shift, nu, 1)
        assert averaged.cylinder_masses([0, 1, 2]) == {(1, 0, 1): 1.0}

    def test_two_terms_on_a_delta(self, binary_shift):
        averaged = pushforward_average(binary_shift, delta_measure(binary_shift, [1, 0, 1]), 2)
        masses = averaged.cylinder_masses([0, 1, 2])
        assert masses == {(0, 1, 0): pytest.approx(0.5), (1, 0, 1): pytest.approx(0.5)}
        assert averaged.provenance == "averaged"
        assert averaged.metadata["boundary_fill"] == 1

    def test_product_measures_are_already_invariant(self, binary_shift):
        product = product_measure(binary_shift, 3)
        averaged = pushforward_average(binary_shift, product, 2)
        assert cylinder_distance(product, averaged, 3) == pytest.approx(0.0, abs=1e-12)
        assert invariance_defect(binary_shift, averaged, 3) == pytest.approx(0.0, abs=1e-12)

    def test_delta_is_far_from_invariant(self, binary_shift):
        assert invariance_defect(binary_shift, delta_measure(binary_shift, [1, 0, 1]), 3) == pytest.approx(1.0)

    def test_argument_errors(self, binary_shift):
        nu = delta_measure(binary_shift, [1, 0, 1])
        with pytest.raises(StructuralError):
            pushforward_average(build_full_shift(AlphabetSpec.interval(2), W=1), nu, 1)
        with pytest.raises(DomainError):
            pushforward_average(binary_shift, nu, 4)
        with pytest.raises(DomainError):
            pushforward_average(binary_shift, nu, 0)


class TestCylinderDistance:
    def test_central_positions(self):
        system = build_full_shift(AlphabetSpec.interval(2), W=2)
        assert list(central_positions(system, 1)) == [2]
        assert list(central_positions(system, 3)) == [1, 2, 3]
        assert list(central_positions(system, 4)) == [1, 2, 3, 4]
        with pytest.raises(DomainError):
            central_positions(system, 6)

    def test_extreme_values(self, binary_shift):
        one = delta_measure(binary_shift, [1, 0, 1])
        other = delta_measure(binary_shift, [0, 1, 0])
        assert cylinder_distance(one, one, 3) == 0.0
        assert cylinder_distance(one, other, 3) == pytest.approx(1.0)
        assert cylinder_distance(one, other, 1) == pytest.approx(1.0)

    def test_weighted_symbol(self):
        system = build_full_shift(AlphabetSpec.interval(2), W=0)
        fair = product_measure(system, 1)
        biased = product_measure(system, 1, [0.75, 0.25])
        assert cylinder_distance(fair, biased, 1) == pytest.approx(0.25)

    def test_systems_must_match(self, binary_shift):
        other = build_full_shift(AlphabetSpec.interval(2), W=1)
        with pytest.raises(StructuralError):
            cylinder_distance(product_measure(binary_shift, 1), product_measure(other, 1), 1)


class TestOptimalCoupling:
    def test_identical_laws(self):
        coupling = optimal_coupling([0.5, 0.5], [0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]])
        assert coupling.expected_cost == pytest.approx(0.0)
        assert coupling.marginal_error <= 1e-9

    def test_moving_a_quarter(self):
        coupling = optimal_coupling([0.5, 0.5], [0.75, 0.25], [[0.0, 1.0], [1.0, 0.0]])
        assert coupling.expected_cost == pytest.approx(0.25)
        np.testing.assert_allclose(coupling.mass, [[0.5, 0.0], [0.25, 0.25]], atol=1e-9)

    def test_everything_moves(self):
        coupling = optimal_coupling([1.0, 0.0], [0.0, 1.0], [[0.0, 3.0], [3.0, 0.0]])
        assert coupling.expected_cost == pytest.approx(3.0)
        assert coupling.joint().mass.sum() == pytest.approx(1.0)

    def test_errors(self):
        with pytest.raises(StructuralError):
            optimal_coupling([0.5, 0.5], [1.0], [[0.0, 1.0]])
        with pytest.raises(DomainError):
            optimal_coupling([0.5, 0.5], [0.5, 0.5], [[0.0, -1.0], [1.0, 0.0]])


class TestPipeline:
    def test_block_counting_exponent(self, binary_shift):
        report = nice_measure_pipeline(binary_shift, s=0.0, delta=0.5, tau=0.0, n_schedule=[2, 1],
                                       eps_grid=[0.5, 0.25, 0.125, 0.0625, 0.03125])
        assert [stage.N for stage in report.stages] == [1, 2]
        assert report.scaling_passed
        assert report.sound
        assert report.averaged_scaling_passed
        assert all(stage.averaged_scaling.n_blocks > 0 for stage in report.stages)
        assert report.stages[0].scaling_constant == 1.0
        assert report.measure.depth == 2
        assert len(report.trajectory) == 1
        assert report.estimate.slope >= 0.0
        data = report.to_dict()
        assert data["rdim_minus_s"] == pytest.approx(report.estimate.slope)
        assert data["cylinder_length"] == 3

    def test_averaged_candidate_is_checked(self, binary_shift):
        space = orbit_metric(binary_shift, 1, "avg")
        words = binary_shift.words(1)
        point = delta_measure(binary_shift, [1, 0, 1])
        pipeline = NiceMeasurePipeline(binary_shift, s=1.0, delta=0.5)
        report = pipeline.averaged_scaling(space, words, point, 1.0, 1.0, "balls")
        assert not report.passed
        assert report.worst_margin == pytest.approx(-1.0)
        assert pipeline.averaged_scaling(space, words, point, 0.0, 1.0, "balls").passed
        assert pipeline.averaged_scaling(space, words, point, 1.0, math.inf, "balls") is None

    def test_argument_errors(self, binary_shift):
        with pytest.raises(DomainError):
            nice_measure_pipeline(binary_shift, -1.0, 0.5, 0.0, [1], [0.5, 0.25, 0.125])
        with pytest.raises(DomainError):
            nice_measure_pipeline(binary_shift, 0.0, 0.5, 0.0, [], [0.5])
