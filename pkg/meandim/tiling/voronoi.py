"""One-dimensional dynamical Voronoi tilings from marker heights.

Site a sits at (a, 1/phi(T^a x)) in the plane; its cell on the axis is the set of
u at least as close to that site as to every other. Comparing sites a and b
gives a single bisector point

    x_ab = (a + b) / 2 + (h_b^2 - h_a^2) / (2 (b - a)),

so every cell is [max_{b<a} x_ab, min_{b>a} x_ab], possibly empty.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from meandim.config import config
from meandim.utils import DomainError, logger

TRUST_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class MarkerTrace:
    """phi(T^a x) for a = start, ..., start + len(values) - 1"""

    start: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("marker trace needs a nonempty 1-D value array", module="tiling", stage="trace")
        if (values < 0).any() or (values > 1).any():
            raise DomainError("marker values must lie in [0, 1]", module="tiling", stage="trace")
        if not (values > 0).any():
            raise DomainError("marker trace has no positive value", module="tiling", stage="trace")
        object.__setattr__(self, "values", values)

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1

    def sites(self) -> Tuple[np.ndarray, np.ndarray]:
        """(positions, heights 1/phi) of the positive markers"""
        idx = np.flatnonzero(self.values > 0)
        return self.start + idx, 1.0 / self.values[idx]

    def shifted(self, n: int) -> "MarkerTrace":
        """Trace of T^n x: phi(T^a T^n x) = phi(T^(a+n) x)"""
        return MarkerTrace(self.start - n, self.values)

    def perturbed(self, delta: np.ndarray) -> "MarkerTrace":
        return MarkerTrace(self.start, np.clip(self.values + delta, 0.0, 1.0))

    def to_dict(self) -> Dict:
        return {"start": self.start, "values": self.values.tolist()}


@dataclass
class Tiling:
    """Cells restricted to the trusted sub-range [low, high]"""

    low: float
    high: float
    cells: Dict[int, Optional[Tuple[float, float]]] = field(default_factory=dict)
    complete: Dict[int, bool] = field(default_factory=dict)
    heights: Dict[int, float] = field(default_factory=dict)

    @property
    def boundary(self) -> List[float]:
        """Cell endpoints strictly inside the trusted range, ties merged"""
        points = sorted(p for cell in self.cells.values() if cell is not None for p in cell
                        if self.low < p < self.high)
        merged: List[float] = []
        for p in points:
            if not merged or p - merged[-1] > 1e-12:
                merged.append(p)
        return merged

    def nonempty(self) -> Dict[int, Tuple[float, float]]:
        return {a: cell for a, cell in self.cells.items() if cell is not None}

    def cell_reach(self) -> float:
        """max over complete cells of max(a - left, right - a)"""
        reach = [max(a - cell[0], cell[1] - a) for a, cell in self.nonempty().items() if self.complete[a]]
        return max(reach) if reach else 0.0

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for a in sorted(self.cells):
            cell = self.cells[a]
            rows.append({"site": a, "height": self.heights.get(a, np.inf),
                         "left": cell[0] if cell else np.nan, "right": cell[1] if cell else np.nan,
                         "complete": self.complete.get(a, False)})
        return pd.DataFrame(rows, columns=["site", "height", "left", "right", "complete"])

    def to_dict(self) -> Dict:
        return {"trusted": [self.low, self.high],
                "cells": {str(a): list(cell) if cell else None for a, cell in sorted(self.cells.items())},
                "boundary": self.boundary}


def _nearest_distance(u: np.ndarray, positions: np.ndarray, heights: np.ndarray) -> np.ndarray:
    return np.sqrt((u[:, None] - positions[None, :]) ** 2 + heights[None, :] ** 2).min(axis=1)


def trusted_range(trace: MarkerTrace) -> Optional[Tuple[float, float]]:
    """Points whose nearest known site is no farther than the nearest unseen integer"""
    positions, heights = trace.sites()
    first, last = trace.start - 1, trace.end + 1
    mid = 0.5 * (first + last)

    def excess(u: float) -> float:
        edge = min(u - first, last - u)
        return float(_nearest_distance(np.array([u]), positions, heights)[0] - edge)

    if excess(mid) > 0:
        return None
    # excess is nonincreasing on the left half and nondecreasing on the right half
    bounds = []
    for outside, inside in ((float(first), mid), (float(last), mid)):
        for _ in range(TRUST_ITERATIONS):
            point = 0.5 * (outside + inside)
            if excess(point) <= 0:
                inside = point
            else:
                outside = point
            if abs(inside - outside) <= 1e-13 * max(1.0, abs(inside)):
                break
        bounds.append(inside)
    return bounds[0], bounds[1]


def tile(trace: MarkerTrace) -> Tiling:
    """Cells I_phi(x, a) for the sites of the trace, clipped to its trusted range"""
    trust = trusted_range(trace)
    if trust is None:
        raise DomainError(f"trace on [{trace.start}, {trace.end}] is too short to trust any cell",
                          module="tiling", stage="tile")
    low, high = trust
    positions, heights = trace.sites()
    tiling = Tiling(low=low, high=high)
    h2 = heights ** 2
    for i, a in enumerate(positions):
        others = np.arange(len(positions)) != i
        b, hb2 = positions[others], h2[others]
        x = 0.5 * (a + b) + (hb2 - h2[i]) / (2.0 * (b - a))
        left = float(x[b < a].max()) if (b < a).any() else -np.inf
        right = float(x[b > a].min()) if (b > a).any() else np.inf
        if right < low or left > high:
            continue
        a = int(a)
        tiling.heights[a] = float(heights[i])
        if left > right:
            tiling.cells[a] = None
            tiling.complete[a] = True
            continue
        tiling.cells[a] = (max(left, low), min(right, high))
        tiling.complete[a] = left >= low and right <= high
    for a in range(trace.start, trace.end + 1):
        if trace.values[a - trace.start] == 0 and low <= a <= high:
            tiling.cells[a] = None
            tiling.complete[a] = True
    logger.debug(f"tiled {len(positions)} sites, trusted range [{low:.4f}, {high:.4f}]")
    return tiling


@dataclass(frozen=True)
class EquivarianceReport:
    n: int
    compared: int
    discrepancy: float

    @property
    def passed(self) -> bool:
        return self.discrepancy <= config.EQUIVARIANCE_TOL

    def to_dict(self) -> Dict:
        return {"n": self.n, "compared": self.compared, "discrepancy": self.discrepancy, "passed": self.passed}


def check_equivariance(t_x: Tiling, t_Tx: Tiling, n: int) -> EquivarianceReport:
    """Compare I_phi(T^n x, a) with -n + I_phi(x, a + n) on cells complete in both"""
    if min(t_x.high - n, t_Tx.high) < max(t_x.low - n, t_Tx.low):
        raise DomainError("trusted ranges do not overlap after the shift", module="tiling",
                          stage="check_equivariance")
    worst, compared = 0.0, 0
    for a, cell in t_Tx.cells.items():
        if not t_Tx.complete.get(a) or not t_x.complete.get(a + n):
            continue
        other = t_x.cells.get(a + n)
        compared += 1
        if (cell is None) != (other is None):
            worst = np.inf
            continue
        if cell is not None:
            worst = max(worst, abs(cell[0] - (other[0] - n)), abs(cell[1] - (other[1] - n)))
    return EquivarianceReport(n=n, compared=compared, discrepancy=float(worst))
