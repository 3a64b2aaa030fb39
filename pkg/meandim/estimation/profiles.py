"""Covering profiles S(eps, N) = log2 #(X, d_N, eps) / N and metric mean dimension"""

import math
from typing import Dict, List, Optional, Sequence

from meandim.estimation.slope import DimensionEstimate, estimate_dimension
from meandim.metric.covering import covering_number
from meandim.systems.orbit import orbit_metric
from meandim.systems.product_cover import product_covering_number
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, StructuralError, logger

PROFILE_MODES = ("exact", "greedy", "auto", "product")


def covering_sample(system: SystemSpec, eps: float, N: int, kind: str = "max",
                    mode: str = "auto") -> Dict:
    """One (eps, N) point of the covering profile"""
    if mode not in PROFILE_MODES:
        raise StructuralError(f"unknown profile mode {mode!r}", module="estimation", stage="covering_profile")
    if mode == "product":
        cover = product_covering_number(system, N, eps, kind)
        log_count, used = cover.log2_count, "product"
    else:
        result = covering_number(orbit_metric(system, N, kind), eps, mode)
        log_count, used = math.log2(max(result.count, 1)), result.mode
    return {"epsilon": eps, "N": N, "metric": kind, "mode": used,
            "log2_count": log_count, "value": log_count / N}


def covering_profile(system: SystemSpec, eps_grid: Sequence[float], n_list: Sequence[int],
                     kind: str = "max", mode: str = "auto") -> List[Dict]:
    """S(X, T, d, eps) over the grid, ordered by (N, decreasing eps)"""
    if not eps_grid or not n_list:
        raise DomainError("eps grid and N list must be nonempty", module="estimation", stage="covering_profile")
    rows = []
    for N in sorted(set(n_list)):
        for eps in sorted(set(eps_grid), reverse=True):
            rows.append(covering_sample(system, eps, N, kind, mode))
        logger.debug(f"{system.label}: covering profile done for N={N}")
    return rows


def metric_mean_dimension_estimate(samples: List[Dict], headline: str = "max_n",
                                   system: Optional[SystemSpec] = None) -> DimensionEstimate:
    """Slope of S(eps, N) against log2(1/eps)"""
    truncation = system.truncation_error() if system is not None else 0.0
    return estimate_dimension(samples, "S", headline=headline, truncation_error=truncation,
                              metadata={"system": system.label} if system is not None else None)
