"""Frostman measures from LP duality and scaling-law verification"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from meandim.config import config
from meandim.hausdorff.content import dim_profile, hausdorff_content
from meandim.hausdorff.weighted import candidate_blocks, incidence, solve_content_lp
from meandim.metric.space import FiniteMetricSpace
from meandim.utils import DomainError, coarse_power, logger


@dataclass
class ScalingLawReport:
    """Worst margin of (tau + diam E)^s - mu(E) over the candidate blocks"""

    s: float
    delta: float
    tau: float
    family: str
    n_blocks: int
    worst_margin: float
    witness: Tuple[int, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -self.tol

    def to_dict(self) -> Dict:
        return {"s": self.s, "delta": self.delta, "tau": self.tau, "family": self.family,
                "n_blocks": self.n_blocks, "worst_margin": self.worst_margin,
                "witness": list(self.witness), "passed": self.passed}


def verify_scaling_law(space: FiniteMetricSpace, measure: Sequence[float], s: float, delta: float,
                       tau: float = 0.0, family: str = "auto", tol: Optional[float] = None) -> ScalingLawReport:
    """Check mu(E) <= (tau + diam E)^s for every candidate block with diam E < delta"""
    tol = config.LP_TOL if tol is None else tol
    mu = np.asarray(measure, dtype=float)
    if mu.shape != (space.size,):
        raise DomainError(f"measure has {mu.size} entries for {space.size} points", module="hausdorff",
                          stage="verify_scaling_law")
    blocks, family = candidate_blocks(space, delta, family)
    if not blocks:
        return ScalingLawReport(s, delta, tau, family, 0, math.inf, (), tol)
    diameters = np.array([space.diameter_of(b) for b in blocks])
    margins = coarse_power(diameters, s, tau) - incidence(blocks, space.size) @ mu
    worst = int(np.argmin(margins))
    report = ScalingLawReport(s, delta, tau, family, len(blocks), float(margins[worst]), blocks[worst], tol)
    if not report.passed:
        logger.debug(f"scaling law fails at block {report.witness} by {-report.worst_margin:.3g}")
    return report


@dataclass
class FrostmanCertificate:
    s: float
    delta: float
    tau: float
    family: str
    measure: np.ndarray
    lp_value: float
    gap: float
    worst_slack: float
    witness: Tuple[int, ...]
    tol: float = field(default_factory=lambda: config.LP_TOL)

    @property
    def mass(self) -> float:
        return float(self.measure.sum())

    @property
    def valid(self) -> bool:
        return self.gap <= self.tol * max(1.0, abs(self.lp_value)) and self.worst_slack >= -self.tol

    def probability(self) -> np.ndarray:
        """The measure normalized to total mass one (uniform when the mass vanishes)"""
        if self.mass <= 0:
            return np.full(len(self.measure), 1.0 / len(self.measure))
        return self.measure / self.mass

    def to_dict(self) -> Dict:
        return {"s": self.s, "delta": self.delta, "tau": self.tau, "family": self.family,
                "measure": self.measure.tolist(), "mass": self.mass, "lp_value": self.lp_value,
                "gap": self.gap, "worst_slack": self.worst_slack, "witness": list(self.witness),
                "valid": self.valid}


def frostman_measure(space: FiniteMetricSpace, s: float, delta: float, tau: float = 0.0,
                     family: str = "auto") -> FrostmanCertificate:
    """Dual-optimal mu maximizing mu(X) subject to mu(E) <= (tau + diam E)^s on blocks with diam E < delta"""
    lp = solve_content_lp(space, s, delta, tau, family)
    check = verify_scaling_law(space, lp.measure, s, delta, tau, lp.family)
    cert = FrostmanCertificate(s=s, delta=delta, tau=tau, family=lp.family, measure=lp.measure,
                               lp_value=lp.primal_value, gap=lp.gap, worst_slack=check.worst_margin,
                               witness=check.witness)
    if not cert.valid:
        logger.warning(f"Frostman certificate flagged invalid: gap {cert.gap:.3g}, "
                       f"worst slack {cert.worst_slack:.3g} at {cert.witness}")
    return cert


@dataclass(frozen=True)
class LemmaInequalityReport:
    s: float
    delta: float
    content_6delta: float
    weighted_delta: float

    @property
    def rhs(self) -> float:
        return 6.0 ** self.s * self.weighted_delta

    @property
    def holds(self) -> bool:
        return self.content_6delta <= self.rhs + config.LP_TOL * max(1.0, self.rhs)

    def to_dict(self) -> Dict:
        return {"s": self.s, "delta": self.delta, "content_6delta": self.content_6delta,
                "weighted_delta": self.weighted_delta, "rhs": self.rhs, "holds": self.holds}


def lemma_inequality_check(space: FiniteMetricSpace, s: float, delta: float) -> LemmaInequalityReport:
    """H^s_{6 delta} <= 6^s lambda^s_delta at tau = 0, both sides exact"""
    lhs = hausdorff_content(space, s, 6 * delta, 0.0, "exact").value
    rhs = solve_content_lp(space, s, delta, 0.0, "all-subsets").primal_value
    return LemmaInequalityReport(s, delta, lhs, rhs)


def frostman_threshold(c: float) -> float:
    """Largest delta_0 in (0, 1) with (1 / delta_0)^((1 - c) / (2c)) >= 6"""
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0, 1), got {c}", module="hausdorff", stage="quantitative_frostman")
    return 6.0 ** (-2 * c / (1 - c))


@dataclass
class QuantitativeFrostmanReport:
    c: float
    delta: float
    delta0: float
    dimension: float
    s: float
    probability: np.ndarray
    certificate: Optional[FrostmanCertificate]
    scaling: ScalingLawReport

    def to_dict(self) -> Dict:
        return {"c": self.c, "delta": self.delta, "delta0": self.delta0, "dimension": self.dimension,
                "s": self.s, "probability": self.probability.tolist(),
                "certificate": self.certificate.to_dict() if self.certificate else None,
                "scaling": self.scaling.to_dict()}


def quantitative_frostman(space: FiniteMetricSpace, c: float, delta: float, tau: float = 0.0,
                          family: str = "auto") -> QuantitativeFrostmanReport:
    """A probability measure with mu(E) <= (tau + diam E)^(c dim) on blocks of diameter < delta / 6"""
    delta0 = frostman_threshold(c)
    if not 0 < delta <= delta0:
        raise DomainError(f"delta={delta} must lie in (0, delta_0(c)={delta0:.6g}]", module="hausdorff",
                          stage="quantitative_frostman")
    dimension = dim_profile(space, delta, tau).value
    s = c * dimension
    if dimension <= config.PROFILE_TOL:
        # 0^0 = 1: a point mass already satisfies every constraint
        probability = np.zeros(space.size)
        probability[0] = 1.0
        certificate = None
    else:
        certificate = frostman_measure(space, s, delta / 6, tau, family)
        probability = certificate.probability()
    scaling = verify_scaling_law(space, probability, s, delta / 6, tau, family)
    return QuantitativeFrostmanReport(c, delta, delta0, dimension, s, probability, certificate, scaling)
