"""Separating and covering bounds on quantized algebraic actions, and rdim against prodim"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from meandim.algebraic.action import (
    AlgebraicActionSpec,
    ProdimResult,
    prodim,
    projection_dimension,
    subadditivity_check,
)
from meandim.algebraic.haar import haar_measure
from meandim.config import config
from meandim.estimation.profiles import covering_profile, metric_mean_dimension_estimate
from meandim.estimation.slope import DimensionEstimate
from meandim.metric.covering import covering_number, separating_number
from meandim.ratedist.dynamical import RDCurve, rd_curve, rdim_estimate
from meandim.systems.orbit import orbit_metric
from meandim.utils import CapacityError, DomainError, logger

SLOPE_TOL = 0.3


@dataclass(frozen=True)
class SeparatingBoundReport:
    N: int
    epsilon: float
    delta: float
    dim: int
    separating: int
    mode: str
    bound: float

    @property
    def margin(self) -> float:
        """log2 of separating count over the bound"""
        return math.log2(self.separating) - math.log2(self.bound)

    @property
    def passed(self) -> bool:
        return self.separating >= self.bound

    def to_dict(self) -> Dict:
        return {"N": self.N, "epsilon": self.epsilon, "delta": self.delta, "dim": self.dim,
                "separating": self.separating, "mode": self.mode, "bound": self.bound,
                "margin": self.margin, "passed": self.passed}


def separating_bound_check(spec: AlgebraicActionSpec, N: int, eps: float, delta: float,
                           mode: str = "auto") -> SeparatingBoundReport:
    """#_sep(X, d̄_N, eps) against 4^-N (1/eps)^((1 - delta) dim pi_N(X))"""
    if not 0 < delta < 1 or eps <= 0:
        raise DomainError("need 0 < delta < 1 and eps > 0", module="algebraic", stage="separating_bound")
    dim = projection_dimension(spec, N).dim
    space = orbit_metric(spec.to_system(), N, "avg")
    # a greedy separated set still certifies the lower side
    result = separating_number(space, eps, mode)
    bound = 4.0 ** -N * (1.0 / eps) ** ((1 - delta) * dim)
    return SeparatingBoundReport(N, eps, delta, dim, result.count, result.mode, bound)


def separating_threshold(spec: AlgebraicActionSpec, N: int, delta: float, eps_grid: Sequence[float],
                         mode: str = "auto") -> Dict:
    """Largest grid eps below which every grid point passes the separating bound"""
    reports = [separating_bound_check(spec, N, eps, delta, mode) for eps in sorted(set(eps_grid))]
    threshold: Optional[float] = None
    for report in reports:
        if not report.passed:
            break
        threshold = report.epsilon
    return {"N": N, "delta": delta, "threshold": threshold, "checks": [r.to_dict() for r in reports]}


@dataclass(frozen=True)
class TorusCoveringReport:
    N: int
    epsilon: float
    dim: int
    bound: float
    count: int
    certificate: str

    @property
    def passed(self) -> bool:
        return self.count >= self.bound

    def to_dict(self) -> Dict:
        return {"N": self.N, "epsilon": self.epsilon, "dim": self.dim, "bound": self.bound, "count": self.count,
                "certificate": self.certificate, "passed": self.passed}


def torus_covering_lower_bound(spec: AlgebraicActionSpec, N: int, eps: float) -> TorusCoveringReport:
    """(1 / (4 eps))^dim pi_N against #(X, d_N, eps) of the quantized group"""
    if not 0 < eps < 0.25:
        raise DomainError(f"eps must lie in (0, 1/4), got {eps}", module="algebraic", stage="torus_covering")
    dim = projection_dimension(spec, N).dim
    bound = (1.0 / (4 * eps)) ** dim
    space = orbit_metric(spec.to_system(), N, "max")
    if space.size <= config.EXACT_POINT_BUDGET:
        count, certificate = covering_number(space, eps, "exact").count, "covering-exact"
    else:
        # separated sets bound the covering number from below
        count, certificate = separating_number(space, eps, "greedy").count, "separating-greedy"
    return TorusCoveringReport(N, eps, dim, bound, count, certificate)


@dataclass
class RdimProdimReport:
    spec: AlgebraicActionSpec
    prodim: ProdimResult
    curve: RDCurve
    rdim: DimensionEstimate
    proxy: Optional[DimensionEstimate] = None
    proxy_note: str = ""
    tolerance: float = SLOPE_TOL
    subadditive: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def chain_holds(self) -> bool:
        """prodim <= rdim slope <= covering proxy, each within the tolerance"""
        ok = self.prodim.value <= self.rdim.slope + self.tolerance
        if self.proxy is not None:
            ok = ok and self.rdim.slope <= self.proxy.slope + self.tolerance
        return ok

    def to_dict(self) -> Dict:
        return {"spec": self.spec.to_dict(), "prodim": self.prodim.to_dict(), "rd_curve": self.curve.to_dict(),
                "rdim": self.rdim.to_dict(), "proxy": self.proxy.to_dict() if self.proxy else None,
                "proxy_note": self.proxy_note, "tolerance": self.tolerance, "chain_holds": self.chain_holds,
                "subadditive": self.subadditive}


def rdim_prodim_experiment(spec: AlgebraicActionSpec, eps_grid: Sequence[float], n_list: Sequence[int],
                           headline: str = "increment", proxy_mode: str = "auto",
                           proxy_eps_grid: Optional[Sequence[float]] = None) -> RdimProdimReport:
    """Haar rate-distortion slope, exact prodim and the covering proxy side by side"""
    system = spec.to_system()
    ns = sorted(set(n_list))
    logger.info(f"rdim/prodim experiment on {system.label}: q={spec.q}, W={spec.W}, N in {ns}")

    # Step 1: exact projective dimension, with two extra depths so the increment can settle
    top = max(ns[-1], spec.a)
    exact = prodim(spec, sorted({N for N in ns if N >= spec.a} | {top, top + 1, top + 2}))

    # Step 2: Haar rate-distortion curve and its slope
    measure = haar_measure(system)
    curve = rd_curve(system, measure, eps_grid, ns)
    rdim = rdim_estimate(curve, headline, system.truncation_error())

    # Step 3: covering proxy on the depths the enumeration budget allows
    proxy, note = None, ""
    affordable = [N for N in ns if system.exhaustive_count(N) <= config.ENUMERATION_BUDGET]
    if len(affordable) >= 2 or (headline != "increment" and affordable):
        try:
            samples = covering_profile(system, proxy_eps_grid or eps_grid, affordable, "max", proxy_mode)
            proxy = metric_mean_dimension_estimate(samples, headline if len(affordable) >= 2 else "max_n", system)
        except CapacityError as e:
            note = str(e)
    else:
        note = f"enumeration budget {config.ENUMERATION_BUDGET} allows N in {affordable} only"
    if note:
        logger.warning(f"covering proxy skipped: {note}")

    report = RdimProdimReport(spec=spec, prodim=exact, curve=curve, rdim=rdim, proxy=proxy, proxy_note=note,
                              subadditive=subadditivity_check(spec, ns).holds)
    logger.info(f"prodim {exact.value:.4f}, rdim slope {rdim.slope:.4f}"
                + (f", covering proxy {proxy.slope:.4f}" if proxy else ""))
    return report
