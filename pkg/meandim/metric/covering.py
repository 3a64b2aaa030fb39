"""Covering and separating numbers, the taming transform and tame-growth diagnostics"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from meandim.config import config
from meandim.metric.space import Cover, FiniteMetricSpace, validate_metric
from meandim.utils import CapacityError, DomainError, StructuralError, logger

MODES = ("exact", "greedy", "auto")


@dataclass(frozen=True)
class CoverResult:
    count: int
    cover: Cover
    mode: str
    epsilon: float

    def __int__(self) -> int:
        return self.count

    def to_dict(self) -> Dict:
        return {"count": self.count, "mode": self.mode, "epsilon": self.epsilon,
                "cover": self.cover.to_dict()}


@dataclass(frozen=True)
class SeparationResult:
    count: int
    witness: Tuple[int, ...]
    mode: str
    epsilon: float

    def __int__(self) -> int:
        return self.count

    def to_dict(self) -> Dict:
        return {"count": self.count, "mode": self.mode, "epsilon": self.epsilon,
                "witness": list(self.witness)}


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _masks(compat: np.ndarray) -> List[int]:
    masks = []
    for i in range(len(compat)):
        m = 1 << i
        for j in np.flatnonzero(compat[i]).tolist():
            m |= 1 << j
        masks.append(m)
    return masks


class _Settled(Exception):
    pass


class CoveringEngine:
    """Minimum partitions into blocks of diameter < eps and maximum eps-separated sets"""

    def __init__(self, space: FiniteMetricSpace, eps: float):
        if eps <= 0:
            raise DomainError(f"eps must be positive, got {eps}", module="metric_core", stage="covering")
        self.space = space
        self.eps = eps
        self.masks = _masks(space.compatibility(eps))
        self.n = space.size

    def resolve_mode(self, mode: str) -> str:
        if mode not in MODES:
            raise StructuralError(f"unknown mode {mode!r}", module="metric_core", stage="covering")
        if mode == "auto":
            return "exact" if self.n <= config.EXACT_POINT_BUDGET else "greedy"
        if mode == "exact" and self.n > config.EXACT_POINT_BUDGET:
            raise CapacityError(
                f"exact mode on {self.n} points exceeds EXACT_POINT_BUDGET={config.EXACT_POINT_BUDGET} "
                f"(env MEANDIM_EXACT_POINTS); use mode='greedy'",
                module="metric_core", stage="covering")
        return mode

    # -- covers -------------------------------------------------------------

    def greedy_blocks(self) -> List[List[int]]:
        """Seed each block at the most constrained point and grow it as large as possible"""
        masks = self.masks
        uncovered = (1 << self.n) - 1
        blocks: List[List[int]] = []
        while uncovered:
            seed = min(_bits(uncovered), key=lambda i: (_popcount(masks[i] & uncovered), i))
            block = [seed]
            candidates = masks[seed] & uncovered & ~(1 << seed)
            while candidates:
                nxt = max(_bits(candidates), key=lambda j: (_popcount(candidates & masks[j]), -j))
                block.append(nxt)
                candidates &= masks[nxt] & ~(1 << nxt)
            blocks.append(block)
            for i in block:
                uncovered &= ~(1 << i)
        return blocks

    def exact_blocks(self) -> List[List[int]]:
        """Branch-and-bound minimum clique cover of the compatibility graph"""
        masks = self.masks
        n = self.n
        order = sorted(range(n), key=lambda i: (_popcount(masks[i]), i))
        best = [list(b) for b in self.greedy_blocks()]
        lower = len(self.greedy_separated())
        if len(best) <= lower:
            return best

        members: List[List[int]] = []
        common: List[int] = []

        def branch(pos: int):
            nonlocal best
            if pos == n:
                if len(members) < len(best):
                    best = [list(b) for b in members]
                    if len(best) <= lower:
                        raise _Settled
                return
            if len(members) >= len(best):
                return
            v = order[pos]
            bit = 1 << v
            for b in range(len(members)):
                if common[b] & bit:
                    saved = common[b]
                    members[b].append(v)
                    common[b] = saved & masks[v]
                    branch(pos + 1)
                    members[b].pop()
                    common[b] = saved
            if len(members) + 1 < len(best):
                members.append([v])
                common.append(masks[v])
                branch(pos + 1)
                members.pop()
                common.pop()

        try:
            branch(0)
        except _Settled:
            pass
        return best

    # -- separated sets -----------------------------------------------------

    def greedy_separated(self) -> List[int]:
        masks = self.masks
        chosen: List[int] = []
        blocked = 0
        for v in sorted(range(self.n), key=lambda i: (_popcount(masks[i]), i)):
            if not blocked & (1 << v):
                chosen.append(v)
                blocked |= masks[v]
        return chosen

    def exact_separated(self) -> List[int]:
        """Maximum independent set of the compatibility graph"""
        masks = self.masks
        best = self.greedy_separated()

        def expand(chosen: List[int], candidates: int):
            nonlocal best
            if len(chosen) + _popcount(candidates) <= len(best):
                return
            if not candidates:
                best = list(chosen)
                return
            v = min(_bits(candidates), key=lambda i: (_popcount(masks[i] & candidates), i))
            chosen.append(v)
            expand(chosen, candidates & ~masks[v])
            chosen.pop()
            expand(chosen, candidates & ~(1 << v))

        expand([], (1 << self.n) - 1)
        return sorted(best)


def covering_number(space: FiniteMetricSpace, eps: float, mode: str = "exact") -> CoverResult:
    """Minimum number of blocks of diameter < eps covering the space"""
    engine = CoveringEngine(space, eps)
    mode = engine.resolve_mode(mode)
    if space.size == 0:
        return CoverResult(0, Cover((), ()), mode, eps)
    blocks = engine.exact_blocks() if mode == "exact" else engine.greedy_blocks()
    cover = Cover.from_blocks(space, blocks)
    logger.debug(f"covering_number({space.label or 'space'}, eps={eps:g}, {mode}) = {len(cover)}")
    return CoverResult(len(cover), cover, mode, eps)


def separating_number(space: FiniteMetricSpace, eps: float, mode: str = "exact") -> SeparationResult:
    """Maximum number of points with pairwise distances >= eps"""
    engine = CoveringEngine(space, eps)
    mode = engine.resolve_mode(mode)
    if space.size == 0:
        return SeparationResult(0, (), mode, eps)
    witness = engine.exact_separated() if mode == "exact" else engine.greedy_separated()
    return SeparationResult(len(witness), tuple(sorted(witness)), mode, eps)


def tame_transform(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """Landmark embedding d'(x, y) = sum_i 2^-i |d(x, x_i) - d(y, x_i)|, landmarks in point order"""
    if space.size == 0:
        raise StructuralError("tame_transform needs a nonempty space", module="metric_core",
                              stage="tame_transform")
    d = space.dist
    tamed = np.zeros_like(d)
    for i in range(space.size):
        weight = 2.0 ** -(i + 1)
        if weight == 0.0:
            break
        column = d[:, i]
        tamed += weight * np.abs(column[:, None] - column[None, :])
    result = FiniteMetricSpace(space.points, tamed, f"{space.label}'" if space.label else "tamed")
    problems = validate_metric(result)
    if problems:
        logger.warning(f"tame_transform produced {len(problems)} metric violations: {problems[0]}")
    return result


@dataclass
class TameGrowthReport:
    delta: float
    points: List[Dict[str, float]] = field(default_factory=list)
    nonincreasing: bool = True

    def to_dict(self) -> Dict:
        return {"delta": self.delta, "points": self.points, "nonincreasing": self.nonincreasing}


def tame_growth_profile(space: FiniteMetricSpace, eps_grid: Sequence[float], delta: float,
                        mode: str = "auto") -> TameGrowthReport:
    """eps^delta * log2 #(X, d, eps) along a decreasing eps grid"""
    if delta <= 0:
        raise DomainError("delta must be positive", module="metric_core", stage="tame_growth")
    report = TameGrowthReport(delta=delta)
    previous = None
    for eps in sorted(eps_grid, reverse=True):
        result = covering_number(space, eps, mode)
        value = eps ** delta * np.log2(max(result.count, 1))
        report.points.append({"epsilon": eps, "count": result.count, "value": float(value),
                              "mode": result.mode})
        if previous is not None and value > previous + 1e-12:
            report.nonincreasing = False
        previous = value
    return report


@dataclass(frozen=True)
class SandwichReport:
    epsilon: float
    delta: float
    separating_eps: int
    covering_eps: int
    separating_delta: int

    @property
    def holds(self) -> bool:
        return self.separating_eps <= self.covering_eps <= self.separating_delta

    def to_dict(self) -> Dict:
        return {"epsilon": self.epsilon, "delta": self.delta, "separating_eps": self.separating_eps,
                "covering_eps": self.covering_eps, "separating_delta": self.separating_delta,
                "holds": self.holds}


def sandwich_check(space: FiniteMetricSpace, eps: float, delta: float) -> SandwichReport:
    """sep(eps) <= cov(eps) <= sep(delta) for 0 < delta < eps / 2"""
    if not 0 < delta < eps / 2:
        raise DomainError(f"need 0 < delta < eps/2, got eps={eps}, delta={delta}",
                          module="metric_core", stage="sandwich")
    return SandwichReport(
        epsilon=eps, delta=delta,
        separating_eps=separating_number(space, eps, "exact").count,
        covering_eps=covering_number(space, eps, "exact").count,
        separating_delta=separating_number(space, delta, "exact").count,
    )
