"""Covers of all depth-N words by product cells, without enumerating the words"""

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from meandim.config import config
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, StructuralError, logger


@dataclass(frozen=True)
class ProductCover:
    epsilon: float
    N: int
    kind: str
    radii: Tuple[float, ...]
    groups: Tuple[int, ...]
    diameter_bound: float
    strategy: str

    @property
    def log2_count(self) -> float:
        return float(sum(math.log2(g) for g in self.groups))

    @property
    def count(self) -> int:
        return math.prod(self.groups)

    def to_dict(self) -> Dict:
        return {"epsilon": self.epsilon, "N": self.N, "metric": self.kind, "log2_count": self.log2_count,
                "radii": list(self.radii), "groups": list(self.groups),
                "diameter_bound": self.diameter_bound, "strategy": self.strategy}


def _line_groups(values: np.ndarray, radius: float) -> int:
    """Fewest groups of diameter <= radius covering points of the line (left-to-right greedy)"""
    v = np.sort(values)
    count, start = 0, None
    for x in v:
        if start is None or x > start + radius + config.DIAMETER_TOL:
            count += 1
            start = x
    return count


def grouping_ladder(system: SystemSpec) -> List[Tuple[float, int]]:
    """(radius, groups) pairs with strictly decreasing group counts, starting at (0, size)"""
    alphabet = system.alphabet
    ladder: List[Tuple[float, int]] = []
    if alphabet.kind == "torus":
        q, r = alphabet.resolution, alphabet.dimension
        for run in range(1, q + 1):
            radius = min(run - 1, q // 2) / q
            groups = math.ceil(q / run) ** r
            if not ladder or groups < ladder[-1][1]:
                ladder.append((radius, groups))
        return ladder
    values = system.coordinate_values()
    gaps = np.unique(np.abs(values[:, None] - values[None, :]))
    for radius in gaps:
        groups = _line_groups(values, float(radius))
        if not ladder or groups < ladder[-1][1]:
            ladder.append((float(radius), groups))
    return ladder


class ProductCoverEngine:
    """Allocates per-coordinate grouping radii under the orbit-metric diameter budget"""

    def __init__(self, system: SystemSpec, N: int, kind: str = "max"):
        if kind not in ("max", "avg"):
            raise StructuralError(f"unknown kind {kind!r}", module="systems", stage="product_cover")
        if N < 1:
            raise DomainError("N must be >= 1", module="systems", stage="product_cover")
        self.system = system
        self.N = N
        self.kind = kind
        self.length = system.word_length(N)
        self.ladder = grouping_ladder(system)
        weights = system.window_weights()
        # windows[n, j] = weight of coordinate j in the n-th shifted window
        self.windows = np.zeros((N, self.length))
        for n in range(N):
            self.windows[n, n:n + len(weights)] = weights

    def bound(self, radii: np.ndarray) -> float:
        per_window = self.windows @ radii
        return float(per_window.max() if self.kind == "max" else per_window.mean())

    def _radii(self, levels: np.ndarray) -> np.ndarray:
        return np.array([self.ladder[k][0] for k in levels])

    def uniform(self, eps: float) -> np.ndarray:
        best = 0
        for k in range(len(self.ladder)):
            if self.bound(self._radii(np.full(self.length, k))) < eps - config.DIAMETER_TOL:
                best = k
        return np.full(self.length, best)

    def greedy(self, eps: float) -> np.ndarray:
        levels = np.zeros(self.length, dtype=int)
        current = self.bound(self._radii(levels))
        top = len(self.ladder) - 1
        while True:
            best_j, best_score, best_bound = None, -1.0, current
            for j in range(self.length):
                if levels[j] >= top:
                    continue
                trial = levels.copy()
                trial[j] += 1
                b = self.bound(self._radii(trial))
                if b >= eps - config.DIAMETER_TOL:
                    continue
                gain = math.log2(self.ladder[levels[j]][1]) - math.log2(self.ladder[levels[j] + 1][1])
                cost = b - current
                score = math.inf if cost <= 0 else gain / cost
                if score > best_score:
                    best_j, best_score, best_bound = j, score, b
            if best_j is None:
                return levels
            levels[best_j] += 1
            current = best_bound

    def cover(self, eps: float) -> ProductCover:
        if eps <= 0:
            raise DomainError("eps must be positive", module="systems", stage="product_cover")
        candidates = {"greedy": self.greedy(eps), "uniform": self.uniform(eps)}
        scored = []
        for name, levels in candidates.items():
            log_count = sum(math.log2(self.ladder[k][1]) for k in levels)
            scored.append((log_count, name, levels))
        scored.sort(key=lambda item: (item[0], item[1]))
        log_count, name, levels = scored[0]
        radii = self._radii(levels)
        result = ProductCover(epsilon=eps, N=self.N, kind=self.kind, radii=tuple(radii.tolist()),
                              groups=tuple(self.ladder[k][1] for k in levels),
                              diameter_bound=self.bound(radii), strategy=name)
        logger.debug(f"product cover eps={eps:g} N={self.N}: log2 count {result.log2_count:.3f} ({name})")
        return result


def product_covering_number(system: SystemSpec, N: int, eps: float, kind: str = "max") -> ProductCover:
    """Upper bound on #(X, d_N, eps) from an explicit product cover of all words"""
    return ProductCoverEngine(system, N, kind).cover(eps)
