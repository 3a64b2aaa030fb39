"""Marker traces built from the tiling lemma recipe and boundary densities"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from meandim.tiling.voronoi import MarkerTrace, Tiling, tile
from meandim.utils import DomainError


def lemma_trace(N: int, M: int, length: int, seed: int, start: Optional[int] = None,
                min_height: float = 0.2) -> MarkerTrace:
    """Positive markers with gaps > N, height-1 markers with gaps <= M"""
    if not 1 <= N < M:
        raise DomainError(f"need 1 <= N < M, got N={N}, M={M}", module="tiling", stage="lemma_trace")
    if length < M:
        raise DomainError("trace shorter than M", module="tiling", stage="lemma_trace")
    rng = np.random.default_rng(seed)
    start = -(length // 2) if start is None else start

    positions = [int(rng.integers(0, M))]
    while True:
        nxt = positions[-1] + int(rng.integers(N + 1, M + 1))
        if nxt >= length:
            break
        positions.append(nxt)

    values = np.zeros(length)
    last_full = None
    for i, p in enumerate(positions):
        nxt = positions[i + 1] if i + 1 < len(positions) else length + M
        forced = last_full is None or nxt - last_full > M
        if forced or rng.random() < 0.5:
            values[p] = 1.0
            last_full = p
        else:
            values[p] = rng.uniform(min_height, 1.0)
    return MarkerTrace(start, values)


def periodic_trace(period: int, start: int, length: int, height: float = 1.0) -> MarkerTrace:
    """phi = height on multiples of the period, 0 elsewhere"""
    a = np.arange(start, start + length)
    return MarkerTrace(start, np.where(a % period == 0, height, 0.0))


@dataclass
class BoundaryDensityReport:
    R: float
    per_trace: List[float]
    reach: float

    @property
    def density(self) -> float:
        return max(self.per_trace)

    def to_dict(self) -> Dict:
        return {"R": self.R, "density": self.density, "per_trace": self.per_trace, "M_empirical": self.reach}


def boundary_count(tiling: Tiling, R: float) -> int:
    if not (tiling.low <= 0 and R <= tiling.high):
        raise DomainError(f"[0, {R}] is not inside the trusted range [{tiling.low:.4f}, {tiling.high:.4f}]",
                          module="tiling", stage="boundary_density")
    return sum(1 for p in tiling.boundary if 0 <= p <= R)


def boundary_density(traces: Sequence[MarkerTrace], R: float) -> BoundaryDensityReport:
    """max over traces of |boundary in [0, R]| / R, with the empirical cell reach M"""
    if R <= 0 or not traces:
        raise DomainError("need R > 0 and at least one trace", module="tiling", stage="boundary_density")
    tilings = [tile(trace) for trace in traces]
    per_trace = [boundary_count(t, R) / R for t in tilings]
    return BoundaryDensityReport(R=R, per_trace=per_trace, reach=max(t.cell_reach() for t in tilings))
