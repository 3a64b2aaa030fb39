"""Coarse Hausdorff content sum (tau + diam E)^s over partitions, and dimension profiles"""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from meandim.config import config
from meandim.metric.covering import CoveringEngine, _popcount, covering_number
from meandim.metric.space import Cover, FiniteMetricSpace
from meandim.utils import DomainError, coarse_power, logger


@dataclass(frozen=True)
class ContentResult:
    value: float
    cover: Cover
    mode: str
    s: float
    epsilon: float
    tau: float

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> Dict:
        return {"value": self.value, "mode": self.mode, "s": self.s, "epsilon": self.epsilon,
                "tau": self.tau, "cover": self.cover.to_dict()}


def block_cost(diameter: float, s: float, tau: float) -> float:
    return float(coarse_power(np.array([diameter]), s, tau)[0])


class ContentEngine:
    """Minimizes sum (tau + diam)^s over partitions into blocks of diameter < eps"""

    def __init__(self, space: FiniteMetricSpace, s: float, eps: float, tau: float = 0.0):
        if s < 0 or tau < 0:
            raise DomainError("s and tau must be nonnegative", module="hausdorff", stage="content")
        self.covering = CoveringEngine(space, eps)
        self.space = space
        self.s = s
        self.tau = tau
        self.masks = self.covering.masks
        self.n = space.size

    def cost(self, diameter: float) -> float:
        return block_cost(diameter, self.s, self.tau)

    def blocks_cost(self, blocks: List[List[int]]) -> float:
        return sum(self.cost(self.space.diameter_of(b)) for b in blocks)

    def merge_blocks(self) -> List[List[int]]:
        """Agglomerative merging from singletons while some merge lowers the total cost"""
        d = np.array(self.space.dist)
        n = self.n
        members = [[i] for i in range(n)]
        diam = np.zeros(n)
        alive = np.ones(n, dtype=bool)
        cost = coarse_power(diam, self.s, self.tau)
        limit = self.covering.eps - config.DIAMETER_TOL
        while True:
            merged_diam = np.maximum(np.maximum(diam[:, None], diam[None, :]), d)
            gain = coarse_power(merged_diam, self.s, self.tau) - cost[:, None] - cost[None, :]
            usable = (merged_diam < limit) & alive[:, None] & alive[None, :]
            np.fill_diagonal(usable, False)
            gain = np.where(usable, gain, np.inf)
            a, b = np.unravel_index(np.argmin(gain), gain.shape)
            if not np.isfinite(gain[a, b]) or gain[a, b] >= -1e-15:
                break
            if b < a:
                a, b = b, a
            members[a].extend(members[b])
            members[b] = []
            diam[a] = merged_diam[a, b]
            cost[a] = coarse_power(diam[a:a + 1], self.s, self.tau)[0]
            alive[b] = False
            # inter-block distances become the max over members
            d[a, :] = np.maximum(d[a, :], d[b, :])
            d[:, a] = d[a, :]
            d[a, a] = diam[a]
        return [sorted(m) for m in members if m]

    def greedy_blocks(self) -> List[List[int]]:
        candidates = [self.merge_blocks(), [sorted(b) for b in self.covering.greedy_blocks()]]
        return min(candidates, key=self.blocks_cost)

    def exact_blocks(self) -> List[List[int]]:
        """Branch and bound over partitions, seeded with the greedy upper bound"""
        masks = self.masks
        d = self.space.dist
        n = self.n
        order = sorted(range(n), key=lambda i: (_popcount(masks[i]), i))
        best_blocks = self.greedy_blocks()
        best = self.blocks_cost(best_blocks)
        base = self.cost(0.0)

        members: List[List[int]] = []
        common: List[int] = []
        diams: List[float] = []

        def lower_bound(pos: int, current: float) -> float:
            if base <= 0:
                return current
            open_mask = 0
            for c in common:
                open_mask |= c
            forced, blocked = 0, 0
            for v in order[pos:]:
                bit = 1 << v
                if open_mask & bit or blocked & bit:
                    continue
                forced += 1
                blocked |= masks[v]
            return current + forced * base

        def branch(pos: int, current: float):
            nonlocal best, best_blocks
            if pos == n:
                if current < best - 1e-15:
                    best = current
                    best_blocks = [list(b) for b in members]
                return
            if lower_bound(pos, current) >= best - 1e-15:
                return
            v = order[pos]
            bit = 1 << v
            for b in range(len(members)):
                if common[b] & bit:
                    grown = max(diams[b], float(d[v, members[b]].max()))
                    delta = self.cost(grown) - self.cost(diams[b])
                    saved = (common[b], diams[b])
                    members[b].append(v)
                    common[b] &= masks[v]
                    diams[b] = grown
                    branch(pos + 1, current + delta)
                    members[b].pop()
                    common[b], diams[b] = saved
            members.append([v])
            common.append(masks[v] & ~bit)
            diams.append(0.0)
            branch(pos + 1, current + base)
            members.pop()
            common.pop()
            diams.pop()

        branch(0, 0.0)
        return [sorted(b) for b in best_blocks]


def hausdorff_content(space: FiniteMetricSpace, s: float, eps: float, tau: float = 0.0,
                      mode: str = "auto") -> ContentResult:
    """Minimum of sum (tau + diam E)^s over partitions into blocks of diameter < eps"""
    engine = ContentEngine(space, s, eps, tau)
    mode = engine.covering.resolve_mode(mode)
    if space.size == 0:
        return ContentResult(0.0, Cover((), ()), mode, s, eps, tau)
    if s == 0:
        # every block costs 0^0 = 1
        result = covering_number(space, eps, mode)
        return ContentResult(float(result.count), result.cover, mode, s, eps, tau)
    blocks = engine.exact_blocks() if mode == "exact" else engine.greedy_blocks()
    cover = Cover.from_blocks(space, blocks)
    value = float(coarse_power(np.array(cover.diameters), s, tau).sum())
    return ContentResult(value, cover, mode, s, eps, tau)


@dataclass(frozen=True)
class DimensionProfile:
    value: float
    epsilon: float
    tau: float
    mode: str
    iterations: int
    content_at_zero: float

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> Dict:
        return {"value": self.value, "epsilon": self.epsilon, "tau": self.tau, "mode": self.mode,
                "iterations": self.iterations, "content_at_zero": self.content_at_zero}


def dim_profile(space: FiniteMetricSpace, eps: float, tau: float = 0.0, mode: str = "auto",
                tol: Optional[float] = None) -> DimensionProfile:
    """sup{s >= 0 : content(s, eps, tau) >= 1} by bisection on [0, PROFILE_S_MAX]"""
    tol = config.PROFILE_TOL if tol is None else tol
    if tau + space.diameter > 1 + config.DIAMETER_TOL:
        raise DomainError(
            f"tau + diam = {tau + space.diameter:.6g} exceeds 1 and the content is not monotone in s; "
            f"rescale the space (FiniteMetricSpace.scaled) first", module="hausdorff", stage="dim_profile")
    if eps <= tau:
        raise DomainError(f"eps={eps} must exceed tau={tau}", module="hausdorff", stage="dim_profile")

    at_zero = hausdorff_content(space, 0.0, eps, tau, mode)
    used = at_zero.mode
    if at_zero.value < 1:
        return DimensionProfile(0.0, eps, tau, used, 0, at_zero.value)

    lo, hi = 0.0, config.PROFILE_S_MAX
    if hausdorff_content(space, hi, eps, tau, used).value >= 1:
        return DimensionProfile(hi, eps, tau, used, 0, at_zero.value)
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if hausdorff_content(space, mid, eps, tau, used).value >= 1:
            lo = mid
        else:
            hi = mid
        iterations += 1
    value = 0.5 * (lo + hi)
    logger.debug(f"dim_profile({space.label or 'space'}, eps={eps:g}, tau={tau:g}) = {value:.6f}")
    return DimensionProfile(value, eps, tau, used, iterations, at_zero.value)
