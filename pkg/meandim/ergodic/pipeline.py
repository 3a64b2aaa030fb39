"""Nice-measure pipeline: Frostman block measures, averaging, and rate-distortion checks.

For every N of the schedule the Frostman LP on (X, d̄_N) with exponent s*N gives a
block measure nu_N. Averaging its shifts gives mu_N. The pipeline records how
the mu_N move (cylinder distances, invariance defects) and runs Blahut-Arimoto on
both: on nu_N to test the GMT lower bound, on the last mu_N for an rdim slope.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from meandim.ergodic.averaging import cylinder_distance, cylinder_marginals, invariance_defect, pushforward_average
from meandim.ergodic.coupling import optimal_coupling
from meandim.estimation.slope import DimensionEstimate
from meandim.hausdorff.frostman import FrostmanCertificate, ScalingLawReport, frostman_measure, verify_scaling_law
from meandim.metric.space import FiniteMetricSpace
from meandim.ratedist.bounds import gmt_lower_bound, gmt_preconditions
from meandim.ratedist.dynamical import RDCurve, dynamical_rd, rd_curve, rdim_estimate
from meandim.systems.measures import MeasureOnSystem
from meandim.systems.orbit import orbit_metric
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, logger

SOUNDNESS_TOL = 1e-6


@dataclass(frozen=True)
class BoundComparison:
    """Block rate of nu_N against the GMT bound at one admissible eps"""

    N: int
    epsilon: float
    R_block: float
    bound: float
    converged: bool

    @property
    def holds(self) -> bool:
        return self.R_block >= self.bound - SOUNDNESS_TOL

    def to_dict(self) -> Dict:
        return {"N": self.N, "epsilon": self.epsilon, "R_block": self.R_block, "bound": self.bound,
                "converged": self.converged, "holds": self.holds}


@dataclass
class PipelineStage:
    N: int
    certificate: FrostmanCertificate
    scaling_constant: float
    block_measure: MeasureOnSystem
    averaged: MeasureOnSystem
    invariance_defect: float
    averaged_scaling: Optional[ScalingLawReport] = None
    comparisons: List[BoundComparison] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {"N": self.N, "mass": self.certificate.mass, "certificate_valid": self.certificate.valid,
                "lp_gap": self.certificate.gap, "scaling_constant": self.scaling_constant,
                "averaged_scaling": self.averaged_scaling.to_dict() if self.averaged_scaling else None,
                "invariance_defect": self.invariance_defect,
                "support_size": self.averaged.support_size,
                "comparisons": [c.to_dict() for c in self.comparisons]}


@dataclass
class PipelineReport:
    s: float
    delta: float
    tau: float
    cylinder_length: int
    stages: List[PipelineStage]
    trajectory: List[Dict]
    measure: MeasureOnSystem
    curve: RDCurve
    estimate: Optional[DimensionEstimate]
    truncation_error: float
    duration: float = 0.0

    @property
    def comparisons(self) -> List[BoundComparison]:
        return [c for stage in self.stages for c in stage.comparisons]

    @property
    def sound(self) -> bool:
        return all(c.holds for c in self.comparisons)

    @property
    def scaling_passed(self) -> bool:
        """Every block measure is a certified Frostman measure at exponent s*N"""
        return all(stage.certificate.valid for stage in self.stages)

    @property
    def averaged_scaling_passed(self) -> Optional[bool]:
        reports = [stage.averaged_scaling for stage in self.stages]
        if any(r is None for r in reports):
            return None
        return all(r.passed for r in reports)

    def to_frame(self) -> pd.DataFrame:
        return self.curve.to_frame()

    def to_dict(self) -> Dict:
        return {
            "s": self.s, "delta": self.delta, "tau": self.tau, "cylinder_length": self.cylinder_length,
            "stages": [stage.to_dict() for stage in self.stages],
            "trajectory": self.trajectory,
            "measure": self.measure.to_dict(),
            "rd_curve": self.curve.to_dict(),
            "rdim": self.estimate.to_dict() if self.estimate is not None else None,
            "rdim_minus_s": self.estimate.slope - self.s if self.estimate is not None else None,
            "scaling_passed": self.scaling_passed,
            "averaged_scaling_passed": self.averaged_scaling_passed,
            "sound": self.sound,
            "truncation_error": self.truncation_error,
        }


class NiceMeasurePipeline:
    """Runs the Frostman -> averaging -> rate-distortion chain over an N schedule"""

    def __init__(self, system: SystemSpec, s: float, delta: float, tau: float = 0.0, family: str = "auto",
                 cylinder_length: Optional[int] = None, headline: str = "max_n"):
        if s < 0 or delta <= 0 or tau < 0:
            raise DomainError("need s >= 0, delta > 0 and tau >= 0", module="ergodic", stage="pipeline")
        self.system = system
        self.s = s
        self.delta = delta
        self.tau = tau
        self.family = family
        self.cylinder_length = cylinder_length or 2 * system.W + 1
        self.headline = headline

    def block_stage(self, N: int, eps_grid: Sequence[float]) -> PipelineStage:
        space = orbit_metric(self.system, N, "avg")
        exponent = self.s * N
        certificate = frostman_measure(space, exponent, self.delta, self.tau, self.family)
        probability = certificate.probability()
        # normalizing inflates the certified measure when its mass is below one
        if certificate.mass >= 1:
            constant = 1.0
        else:
            constant = 1.0 / certificate.mass if certificate.mass > 0 else math.inf
        words = self.system.words(N)
        block = MeasureOnSystem(self.system, N, words, probability, provenance="frostman",
                                metadata={"s": exponent, "delta": self.delta, "tau": self.tau})
        averaged = pushforward_average(self.system, block, N)
        stage = PipelineStage(N=N, certificate=certificate, scaling_constant=constant, block_measure=block,
                              averaged=averaged,
                              invariance_defect=invariance_defect(self.system, averaged, self.cylinder_length),
                              averaged_scaling=self.averaged_scaling(space, words, averaged, exponent, constant,
                                                                     certificate.family))

        if math.isfinite(constant):
            for eps in sorted(set(eps_grid), reverse=True):
                if gmt_preconditions(exponent, eps, self.delta, self.tau) is not None:
                    continue
                bound = gmt_lower_bound(exponent, eps, self.delta, self.tau).value - math.log2(constant)
                point = dynamical_rd(self.system, block, N, eps, "dense")
                stage.comparisons.append(BoundComparison(N, eps, point.R_bits * N, bound, point.converged))
        return stage

    def averaged_scaling(self, space: FiniteMetricSpace, words: np.ndarray, averaged: MeasureOnSystem,
                         exponent: float, constant: float, family: str) -> Optional[ScalingLawReport]:
        """Scaling law mu(E) <= K (tau + diam E)^s of the averaged candidate on (X, d̄_N)"""
        if not math.isfinite(constant):
            return None
        index = {tuple(int(v) for v in row): i for i, row in enumerate(words)}
        support, mass = averaged.support()
        masses = np.zeros(len(words))
        for row, m in zip(support, mass):
            key = tuple(int(v) for v in row)
            if key not in index:
                logger.debug(f"averaged support leaves the enumerated depth-{averaged.depth} words")
                return None
            masses[index[key]] += m
        return verify_scaling_law(space, masses / constant, exponent, self.delta, self.tau, family)

    def _step(self, previous: MeasureOnSystem, current: MeasureOnSystem, N: int) -> Dict:
        m = self.cylinder_length
        tv = cylinder_distance(previous, current, m)
        a, b = cylinder_marginals(previous, m), cylinder_marginals(current, m)
        keys_a, keys_b = sorted(a), sorted(b)
        cost = np.array([[0.0 if x == y else 1.0 for y in keys_b] for x in keys_a])
        coupling = optimal_coupling([a[k] for k in keys_a], [b[k] for k in keys_b], cost)
        return {"N": N, "cylinder_distance": tv, "coupling_cost": coupling.expected_cost}

    def run(self, n_schedule: Sequence[int], eps_grid: Sequence[float]) -> PipelineReport:
        start = time.time()
        schedule = sorted(set(n_schedule))
        if not schedule or not eps_grid:
            raise DomainError("N schedule and eps grid must be nonempty", module="ergodic", stage="pipeline")
        logger.info(f"Nice-measure pipeline on {self.system.label}: s={self.s}, delta={self.delta}, "
                    f"tau={self.tau}, N in {schedule}")

        # Step 1: Frostman block measures, averaging and bound checks per N
        stages = []
        for N in schedule:
            stage = self.block_stage(N, eps_grid)
            stages.append(stage)
            logger.info(f"N={N}: Frostman mass {stage.certificate.mass:.4g}, scaling constant "
                        f"{stage.scaling_constant:.4g}, {len(stage.comparisons)} bound comparisons")

        # Step 2: Trajectory of the averaged measures
        trajectory = [self._step(a.averaged, b.averaged, b.N) for a, b in zip(stages, stages[1:])]

        # Step 3: Rate-distortion curve of the final candidate
        measure = stages[-1].averaged
        curve = rd_curve(self.system, measure, eps_grid, schedule, "dense")
        if curve.unconverged:
            logger.warning(f"{len(curve.unconverged)} rate-distortion points did not converge")

        # Step 4: rdim slope of the candidate
        estimate = rdim_estimate(curve, self.headline, self.system.truncation_error())
        report = PipelineReport(s=self.s, delta=self.delta, tau=self.tau, cylinder_length=self.cylinder_length,
                                stages=stages, trajectory=trajectory, measure=measure, curve=curve,
                                estimate=estimate, truncation_error=self.system.truncation_error(),
                                duration=time.time() - start)
        if not report.sound:
            failed = [c for c in report.comparisons if not c.holds]
            logger.warning(f"GMT bound exceeded the block rate at {len(failed)} points")
        logger.info(f"Pipeline finished: rdim estimate {estimate.slope:.4f} against s={self.s}")
        return report


def nice_measure_pipeline(system: SystemSpec, s: float, delta: float, tau: float, n_schedule: Sequence[int],
                          eps_grid: Sequence[float], family: str = "auto", headline: str = "max_n",
                          cylinder_length: Optional[int] = None) -> PipelineReport:
    """Run the Frostman, averaging and rate-distortion chain and compare against the GMT bound"""
    return NiceMeasurePipeline(system, s, delta, tau, family, cylinder_length, headline).run(n_schedule, eps_grid)
