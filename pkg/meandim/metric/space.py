"""Finite metric spaces, covers and the metric validator"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from meandim.config import config
from meandim.utils import StructuralError, logger


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Point identifiers plus a dense distance matrix"""

    points: Tuple[str, ...]
    dist: np.ndarray
    label: str = ""

    def __post_init__(self):
        points = tuple(str(p) for p in self.points)
        dist = np.array(self.dist, dtype=float, copy=True)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise StructuralError(f"distance matrix must be square, got shape {dist.shape}",
                                  module="metric_core", stage="construct")
        if dist.shape[0] != len(points):
            raise StructuralError(
                f"distance matrix has {dist.shape[0]} rows for {len(points)} points",
                module="metric_core", stage="construct")
        dist.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "dist", dist)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.size else 0.0

    def diameter_of(self, indices: Sequence[int]) -> float:
        idx = list(indices)
        if len(idx) < 2:
            return 0.0
        return float(self.dist[np.ix_(idx, idx)].max())

    def subspace(self, indices: Sequence[int], label: Optional[str] = None) -> "FiniteMetricSpace":
        idx = list(indices)
        return FiniteMetricSpace(tuple(self.points[i] for i in idx),
                                 self.dist[np.ix_(idx, idx)],
                                 label if label is not None else self.label)

    def scaled(self, factor: float) -> "FiniteMetricSpace":
        return FiniteMetricSpace(self.points, self.dist * factor, self.label)

    def compatibility(self, eps: float) -> np.ndarray:
        """Boolean matrix of pairs at distance strictly below eps"""
        return self.dist < eps - config.DIAMETER_TOL

    def to_dict(self) -> Dict:
        return {"label": self.label, "points": list(self.points), "dist": self.dist.tolist()}

    @classmethod
    def from_dict(cls, data: Dict) -> "FiniteMetricSpace":
        try:
            return cls(tuple(data["points"]), np.asarray(data["dist"], dtype=float),
                       data.get("label", ""))
        except KeyError as e:
            raise StructuralError(f"missing field {e}", module="metric_core", stage="from_dict")

    @classmethod
    def from_values(cls, values: Sequence[float], label: str = "") -> "FiniteMetricSpace":
        """Subset of the real line with the absolute-value metric"""
        v = np.asarray(values, dtype=float)
        return cls(tuple(f"{x:g}" for x in v), np.abs(v[:, None] - v[None, :]), label)


@dataclass(frozen=True)
class Cover:
    """A partition-style cover with per-block diameters"""

    blocks: Tuple[Tuple[int, ...], ...]
    diameters: Tuple[float, ...]

    @classmethod
    def from_blocks(cls, space: FiniteMetricSpace, blocks: Sequence[Sequence[int]]) -> "Cover":
        ordered = tuple(tuple(sorted(b)) for b in blocks)
        return cls(ordered, tuple(space.diameter_of(b) for b in ordered))

    def __len__(self) -> int:
        return len(self.blocks)

    def covers(self, n_points: int) -> bool:
        seen = set()
        for block in self.blocks:
            seen.update(block)
        return seen == set(range(n_points))

    def to_dict(self) -> Dict:
        return {"blocks": [list(b) for b in self.blocks], "diameters": list(self.diameters)}


@dataclass(frozen=True)
class MetricViolation:
    axiom: str
    indices: Tuple[int, ...]
    excess: float

    def __str__(self) -> str:
        return f"{self.axiom} violation at {self.indices} (excess {self.excess:.3g})"

    def to_dict(self) -> Dict:
        return {"axiom": self.axiom, "indices": list(self.indices), "excess": self.excess}


def validate_metric(space: FiniteMetricSpace, tol: Optional[float] = None) -> List[MetricViolation]:
    """Check every metric axiom exhaustively; an empty list means a valid metric"""
    tol = config.DIAMETER_TOL if tol is None else tol
    d = space.dist
    n = space.size
    violations: List[MetricViolation] = []

    for i in range(n):
        if abs(d[i, i]) > tol:
            violations.append(MetricViolation("identity", (i,), float(abs(d[i, i]))))

    for i in range(n):
        for j in range(i + 1, n):
            if abs(d[i, j] - d[j, i]) > tol:
                violations.append(MetricViolation("symmetry", (i, j), float(abs(d[i, j] - d[j, i]))))
            if min(d[i, j], d[j, i]) <= tol:
                violations.append(MetricViolation("positivity", (i, j), float(-min(d[i, j], d[j, i]))))

    # d(i, j) <= d(i, k) + d(k, j), reported once per unordered pair i < j
    for k in range(n):
        excess = d - (d[:, k][:, None] + d[k, :][None, :])
        bad_i, bad_j = np.nonzero(np.triu(excess > tol, k=1))
        for i, j in zip(bad_i.tolist(), bad_j.tolist()):
            if k in (i, j):
                continue
            violations.append(MetricViolation("triangle", (i, k, j), float(excess[i, j])))

    if violations:
        logger.debug(f"{space.label or 'space'}: {len(violations)} metric violations")
    violations.sort(key=lambda v: (v.axiom, v.indices))
    return violations
