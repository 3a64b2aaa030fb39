import math

import numpy as np
import pytest

from meandim.algebraic import AlgebraicActionSpec, haar_measure
from meandim.ratedist import (
    BlahutArimotoSolver,
    DiscreteDistribution,
    JointDistribution,
    RDCurve,
    RDPoint,
    blahut_arimoto,
    duality_lower_bound,
    dynamical_rd,
    entropy,
    gmt_lower_bound,
    kl_divergence,
    mutual_information,
    mutual_information_of,
    rd_curve,
    rdim_estimate,
)
from meandim.ratedist.bounds import gmt_preconditions
from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.measures import delta_measure, product_measure
from meandim.systems.shift import build_full_shift
from meandim.utils import CertificateRejected, DomainError, StructuralError

HAMMING = np.array([[0.0, 1.0], [1.0, 0.0]])


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def random_channel(rng, n, m):
    w = rng.random((n, m))
    return w / w.sum(axis=1, keepdims=True)


def random_law(rng, n):
    w = rng.random(n) + 0.05
    return w / w.sum()


class TestInformation:
    def test_independent_pair(self):
        assert mutual_information(JointDistribution.from_matrix(np.full((2, 2), 0.25))) == pytest.approx(0.0)

    def test_identity_channel(self):
        assert mutual_information(JointDistribution.from_matrix([[0.5, 0.0], [0.0, 0.5]])) == pytest.approx(1.0)

    def test_noisy_channel(self):
        joint = JointDistribution.from_matrix([[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
        assert mutual_information(joint) == pytest.approx(1 - binary_entropy(1 / 3))
        assert mutual_information(joint) == pytest.approx(0.0817, abs=1e-4)

    def test_unnormalized_joint(self):
        with pytest.raises(DomainError):
            JointDistribution.from_matrix([[0.5, 0.5], [0.5, 0.5]])

    def test_entropy_and_divergence(self):
        assert entropy(DiscreteDistribution.uniform(4)) == pytest.approx(2.0)
        assert kl_divergence([0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.0)
        assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf

    def test_data_processing(self, rng):
        for _ in range(500):
            p = random_law(rng, 4)
            first, second = random_channel(rng, 4, 3), random_channel(rng, 3, 5)
            assert mutual_information_of(p, first @ second) <= mutual_information_of(p, first) + 1e-9

    def test_concave_in_source_convex_in_channel(self, rng):
        for _ in range(500):
            p, q = random_law(rng, 3), random_law(rng, 3)
            w1, w2 = random_channel(rng, 3, 4), random_channel(rng, 3, 4)
            t = float(rng.random())
            mixed_source = mutual_information_of(t * p + (1 - t) * q, w1)
            assert mixed_source >= t * mutual_information_of(p, w1) + (1 - t) * mutual_information_of(q, w1) - 1e-9
            mixed_channel = mutual_information_of(p, t * w1 + (1 - t) * w2)
            assert mixed_channel <= t * mutual_information_of(p, w1) + (1 - t) * mutual_information_of(p, w2) + 1e-9

    def test_independent_inputs_are_superadditive(self, rng):
        for _ in range(500):
            p1, p2 = random_law(rng, 2), random_law(rng, 3)
            channel = random_channel(rng, 6, 6)
            joint = (np.kron(p1, p2)[:, None] * channel).reshape(2, 3, 2, 3)
            whole = mutual_information_of(np.kron(p1, p2), channel)
            first = mutual_information(JointDistribution.from_matrix(joint.sum(axis=(1, 3))))
            second = mutual_information(JointDistribution.from_matrix(joint.sum(axis=(0, 2))))
            assert whole >= first + second - 1e-9

    def test_product_channel_is_additive(self, rng):
        p1, p2 = random_law(rng, 2), random_law(rng, 3)
        w1, w2 = random_channel(rng, 2, 2), random_channel(rng, 3, 3)
        whole = mutual_information_of(np.kron(p1, p2), np.kron(w1, w2))
        assert whole == pytest.approx(mutual_information_of(p1, w1) + mutual_information_of(p2, w2))


class TestBlahutArimoto:
    def test_binary_hamming_endpoints(self):
        solver = BlahutArimotoSolver([0.5, 0.5], HAMMING)
        lossless = solver.solve(0.0)
        assert lossless.R == pytest.approx(1.0, abs=1e-6)
        assert lossless.regime == "minimum-distortion"
        constant = solver.solve(0.5)
        assert constant.R == pytest.approx(0.0)
        assert constant.regime == "constant"

    def test_binary_hamming_curve(self):
        solution = BlahutArimotoSolver([0.5, 0.5], HAMMING).solve(0.11)
        assert solution.converged
        assert solution.D <= 0.11 + 1e-9
        assert solution.R == pytest.approx(1 - binary_entropy(0.11), abs=1e-5)

    def test_slope_mode(self):
        solution = blahut_arimoto([0.5, 0.5], HAMMING, a=3.0)
        assert solution.D == pytest.approx(1 / 9)
        assert solution.R == pytest.approx(1 - binary_entropy(1 / 9), abs=1e-9)

    def test_certificate_is_feasible_and_below_rate(self):
        for eps in (0.05, 0.11, 0.3):
            solution = BlahutArimotoSolver([0.5, 0.5], HAMMING).solve(eps)
            bound = duality_lower_bound(solution.source, HAMMING, a=solution.a, eps=eps,
                                        log2_lam=solution.log2_lam)
            assert bound.value == pytest.approx(solution.lower_bound)
            assert bound.worst_margin >= -1e-9
            assert solution.lower_bound <= solution.R + 1e-7
            assert solution.R - solution.lower_bound < 1e-4

    def test_matches_grid_search(self):
        p = np.array([0.3, 0.7])
        D = np.array([[0.0, 0.8], [0.5, 0.1]])
        eps = 0.2
        solution = BlahutArimotoSolver(p, D).solve(eps)

        u, v = np.meshgrid(np.linspace(0, 1, 1001), np.linspace(0, 1, 1001), indexing="ij")
        joint = np.stack([p[0] * (1 - u), p[0] * u, p[1] * v, p[1] * (1 - v)], axis=-1)
        distortion = joint @ D.ravel()
        py = np.stack([joint[..., 0] + joint[..., 2], joint[..., 1] + joint[..., 3]], axis=-1)
        px = np.repeat(p, 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = joint * (np.log2(joint) - np.log2(px) - np.log2(py[..., [0, 1, 0, 1]]))
        info = np.nansum(terms, axis=-1)
        grid_best = info[distortion <= eps].min()
        assert solution.R <= grid_best + 1e-6
        assert grid_best <= solution.R + 0.02

    def test_input_errors(self):
        with pytest.raises(StructuralError):
            BlahutArimotoSolver([0.5, 0.5], np.zeros((3, 2)))
        with pytest.raises(DomainError):
            BlahutArimotoSolver([0.5, 0.5], -HAMMING)
        with pytest.raises(DomainError):
            BlahutArimotoSolver([0.5, 0.5], [[0.5, 1.0], [1.0, 0.5]]).solve(0.1)
        with pytest.raises(StructuralError):
            blahut_arimoto([0.5, 0.5], HAMMING)
        with pytest.raises(StructuralError):
            blahut_arimoto([0.5, 0.5], HAMMING, eps=0.1, a=1.0)


class TestBounds:
    def test_trivial_certificate(self):
        assert duality_lower_bound([0.5, 0.5], HAMMING, lam=[1.0, 1.0]).value == pytest.approx(0.0)

    def test_infeasible_certificate(self):
        with pytest.raises(CertificateRejected) as info:
            duality_lower_bound([0.5, 0.5], HAMMING, lam=[2.0, 2.0])
        assert info.value.index == 0
        assert info.value.margin == pytest.approx(1.0)

    def test_certificate_needs_lambda(self):
        with pytest.raises(StructuralError):
            duality_lower_bound([0.5, 0.5], HAMMING)
        with pytest.raises(DomainError):
            duality_lower_bound([0.5, 0.5], HAMMING, lam=[1.0, 0.0])

    def test_gmt_constant(self):
        assert gmt_lower_bound(0.0, 0.25, 1.0).value == pytest.approx(-math.log2(3))
        bound = gmt_lower_bound(1.0, 2.0 ** -10, 0.5)
        assert bound.value == pytest.approx(9 - math.log2(2 + 3 / math.log(2)))
        assert bound.value == pytest.approx(6.338, abs=1e-3)
        assert bound.rate_floor == bound.value

    def test_stirling_uniform_constant(self):
        bounds = [gmt_lower_bound(s, 2.0 ** -10, 0.5) for s in np.linspace(0.0, 20.0, 401)]
        C = bounds[0].C
        assert all(b.C == C for b in bounds)
        assert all(b.C_at_s <= C + 1e-9 for b in bounds)
        assert all(b.uniform_value <= b.value + 1e-9 for b in bounds)
        assert max(b.C_at_s for b in bounds) == pytest.approx(C, abs=1e-3)
        # the large-s limit sits below the peak
        assert 1 + math.log2(3 / (math.e * math.log(2))) < C < 2
        assert bounds[0].C_at_s == pytest.approx(math.log2(3))
        assert "uniform_value" in bounds[20].to_dict()

    def test_gmt_preconditions(self):
        assert gmt_preconditions(1.0, 2.0 ** -10, 0.5, 0.0) is None
        assert "delta" in gmt_preconditions(1.0, 0.25, 0.5, 0.0)
        with pytest.raises(DomainError):
            gmt_lower_bound(1.0, 2.0 ** -10, 0.5, tau=0.1)
        with pytest.raises(DomainError):
            gmt_lower_bound(-1.0, 0.25, 1.0)


class TestDynamicalRD:
    def test_delta_measure_costs_nothing(self, binary_shift):
        point = dynamical_rd(binary_shift, delta_measure(binary_shift, [1, 0, 1]), 1, 0.1)
        assert point.R_bits == pytest.approx(0.0)

    def test_eps_beyond_diameter(self, binary_shift):
        point = dynamical_rd(binary_shift, product_measure(binary_shift, 1), 1, 2.5)
        assert point.R_bits == 0.0
        assert point.regime == "constant"

    def test_separable_matches_dense(self, binary_shift):
        measure = product_measure(binary_shift, 1)
        dense = dynamical_rd(binary_shift, measure, 1, 0.5, "dense")
        separable = dynamical_rd(binary_shift, measure, 1, 0.5, "separable")
        assert separable.R_bits == pytest.approx(dense.R_bits, abs=1e-4)
        assert separable.lower_bound <= separable.R_bits + 1e-6

    def test_separable_matches_dense_on_longer_blocks(self):
        system = build_full_shift(AlphabetSpec.interval(2), W=2)
        measure = product_measure(system, 2)
        dense = dynamical_rd(system, measure, 2, 0.25, "dense")
        separable = dynamical_rd(system, measure, 2, 0.25, "separable")
        assert separable.R_bits == pytest.approx(dense.R_bits, abs=1e-3)

    def test_homogeneous_matches_dense(self):
        measure = haar_measure(AlgebraicActionSpec(r=1, a=1, M=(), q=4, W=0))
        system = measure.system
        dense = dynamical_rd(system, measure, 1, 0.1, "dense")
        group = dynamical_rd(system, measure, 1, 0.1, "homogeneous")
        assert group.R_bits == pytest.approx(dense.R_bits, abs=1e-4)
        assert group.lower_bound <= group.R_bits + 1e-6

    def test_argument_errors(self, binary_shift):
        measure = product_measure(binary_shift, 1)
        with pytest.raises(DomainError):
            dynamical_rd(binary_shift, measure, 0, 0.5)
        with pytest.raises(StructuralError):
            dynamical_rd(build_full_shift(AlphabetSpec.interval(2), W=1), measure, 1, 0.5)
        with pytest.raises(StructuralError):
            dynamical_rd(binary_shift, measure, 1, 0.5, "fast")
        with pytest.raises(DomainError):
            dynamical_rd(binary_shift, delta_measure(binary_shift, [1, 0, 1]), 1, 0.5, "separable")
        with pytest.raises(DomainError):
            dynamical_rd(binary_shift, measure, 1, 0.5, "homogeneous")

    def test_curve_order_and_monotonicity(self, binary_shift):
        curve = rd_curve(binary_shift, product_measure(binary_shift, 1), [0.25, 0.75, 0.5], [2, 1])
        assert [(p.N, p.epsilon) for p in curve.points] == [
            (1, 0.75), (1, 0.5), (1, 0.25), (2, 0.75), (2, 0.5), (2, 0.25)]
        assert curve.monotone()
        assert curve.unconverged == []
        assert list(curve.to_frame().columns[:5]) == RDCurve.CSV_COLUMNS
        assert curve.source["method"] == "separable"

    def test_empty_grid(self, binary_shift):
        with pytest.raises(DomainError):
            rd_curve(binary_shift, product_measure(binary_shift, 1), [], [1])


def synthetic_curve(fn, converged=True, eps_grid=(0.5, 0.25, 0.125, 0.0625, 0.03125)):
    points = [RDPoint(eps, N, fn(eps), eps, converged, 1, "dense", "bisection", 0.0)
              for N in (1, 2) for eps in eps_grid]
    return RDCurve(points=points)


class TestRdim:
    def test_slopes(self):
        assert rdim_estimate(synthetic_curve(lambda e: 2 * math.log2(1 / e))).slope == pytest.approx(2.0)
        assert rdim_estimate(synthetic_curve(lambda e: 0.0)).slope == pytest.approx(0.0)

    def test_unconverged_points_are_left_out(self):
        with pytest.raises(DomainError):
            rdim_estimate(synthetic_curve(lambda e: 1.0, converged=False))

    def test_truncation_is_recorded(self):
        estimate = rdim_estimate(synthetic_curve(lambda e: math.log2(1 / e)), truncation_error=0.5)
        assert estimate.truncation_error == 0.5
        assert estimate.quantity == "R"

    def test_needs_a_decade(self):
        with pytest.raises(DomainError, match="decade"):
            rdim_estimate(synthetic_curve(lambda e: 1.0, eps_grid=(0.5, 0.35, 0.25)))
        # three octaves still fall short of a factor of ten
        with pytest.raises(DomainError, match="decade"):
            rdim_estimate(synthetic_curve(lambda e: math.log2(1 / e), eps_grid=(0.5, 0.25, 0.125, 0.0625)))
        estimate = rdim_estimate(synthetic_curve(lambda e: math.log2(1 / e), eps_grid=(0.5, 0.2, 0.05)))
        assert estimate.slope == pytest.approx(1.0)
