"""Weighted content as a fractional-cover LP and its dual, solved with HiGHS"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from meandim.config import config
from meandim.metric.covering import _masks
from meandim.metric.space import FiniteMetricSpace
from meandim.utils import CapacityError, DomainError, NumericError, StructuralError, coarse_power, logger

FAMILIES = ("all-subsets", "balls", "auto")

HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def resolve_family(space: FiniteMetricSpace, family: str) -> str:
    if family not in FAMILIES:
        raise StructuralError(f"unknown block family {family!r}", module="hausdorff", stage="family")
    if family == "auto":
        return "all-subsets" if space.size <= config.ALL_SUBSETS_BUDGET else "balls"
    if family == "all-subsets" and space.size > config.ALL_SUBSETS_BUDGET:
        raise CapacityError(
            f"all-subsets family on {space.size} points exceeds ALL_SUBSETS_BUDGET={config.ALL_SUBSETS_BUDGET}; "
            f"use family='balls'", module="hausdorff", stage="family")
    return family


def candidate_blocks(space: FiniteMetricSpace, delta: float, family: str = "auto") -> Tuple[List[Tuple[int, ...]], str]:
    """Blocks of diameter < delta: every such subset, or every closed metric ball"""
    family = resolve_family(space, family)
    n = space.size
    blocks: List[Tuple[int, ...]] = []
    if family == "all-subsets":
        masks = _masks(space.compatibility(delta))

        def extend(chosen: List[int], candidates: int, start: int):
            for v in range(start, n):
                if candidates >> v & 1:
                    chosen.append(v)
                    blocks.append(tuple(chosen))
                    extend(chosen, candidates & masks[v], v + 1)
                    chosen.pop()

        extend([], (1 << n) - 1, 0)
    else:
        seen = set()
        limit = delta - config.DIAMETER_TOL
        for x in range(n):
            row = space.dist[x]
            for r in np.unique(row):
                ball = tuple(np.flatnonzero(row <= r + config.DIAMETER_TOL).tolist())
                if ball in seen:
                    continue
                if space.diameter_of(ball) >= limit:
                    break
                seen.add(ball)
                blocks.append(ball)
        blocks.sort(key=lambda b: (len(b), b))
    return blocks, family


@dataclass(frozen=True, eq=False)
class ContentLP:
    """Primal fractional cover and dual measure for one (s, delta, tau, family)"""

    s: float
    delta: float
    tau: float
    family: str
    blocks: Tuple[Tuple[int, ...], ...]
    costs: np.ndarray
    weights: np.ndarray
    measure: np.ndarray
    primal_value: float
    dual_value: float

    @property
    def gap(self) -> float:
        return abs(self.primal_value - self.dual_value)

    def to_dict(self) -> Dict:
        support = np.flatnonzero(self.weights > 0)
        return {"s": self.s, "delta": self.delta, "tau": self.tau, "family": self.family,
                "value": self.primal_value, "dual_value": self.dual_value, "gap": self.gap,
                "n_blocks": len(self.blocks),
                "cover": [{"block": list(self.blocks[i]), "weight": float(self.weights[i])} for i in support]}


def incidence(blocks: List[Tuple[int, ...]], n: int) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(len(blocks)), [len(b) for b in blocks])
    cols = np.fromiter((v for b in blocks for v in b), dtype=np.int64, count=len(rows))
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(blocks), n))


def solve_content_lp(space: FiniteMetricSpace, s: float, delta: float, tau: float = 0.0,
                     family: str = "auto") -> ContentLP:
    """min sum c_E (tau + diam E)^s s.t. every point is covered with weight >= 1, plus its dual"""
    if s < 0 or tau < 0 or delta <= 0:
        raise DomainError("need s >= 0, tau >= 0 and delta > 0", module="hausdorff", stage="weighted_content")
    n = space.size
    blocks, family = candidate_blocks(space, delta, family)
    if n == 0:
        empty = np.zeros(0)
        return ContentLP(s, delta, tau, family, (), empty, empty, empty, 0.0, 0.0)

    diameters = np.array([space.diameter_of(b) for b in blocks])
    costs = coarse_power(diameters, s, tau)
    A = incidence(blocks, n)

    primal = linprog(costs, A_ub=-A.T.tocsr(), b_ub=-np.ones(n), bounds=(0, None), method="highs",
                     options=HIGHS_OPTIONS)
    dual = linprog(-np.ones(n), A_ub=A, b_ub=costs, bounds=(0, None), method="highs",
                   options=HIGHS_OPTIONS)
    for name, res in (("primal", primal), ("dual", dual)):
        if res.status != 0:
            raise NumericError(f"{name} LP failed: {res.message}", module="hausdorff", stage="weighted_content")

    weights = np.clip(primal.x, 0.0, None)
    measure = np.clip(dual.x, 0.0, None)
    result = ContentLP(s=s, delta=delta, tau=tau, family=family, blocks=tuple(blocks), costs=costs,
                       weights=weights, measure=measure, primal_value=float(primal.fun),
                       dual_value=float(measure.sum()))
    logger.debug(f"content LP over {len(blocks)} {family} blocks: value {result.primal_value:.6g}, "
                 f"gap {result.gap:.2e}")
    return result


@dataclass(frozen=True)
class WeightedCover:
    value: float
    blocks: Tuple[Tuple[int, ...], ...]
    weights: Tuple[float, ...]
    family: str

    def to_dict(self) -> Dict:
        return {"value": self.value, "family": self.family,
                "cover": [{"block": list(b), "weight": w} for b, w in zip(self.blocks, self.weights)]}


def weighted_content(space: FiniteMetricSpace, s: float, delta: float, tau: float = 0.0,
                     family: str = "auto") -> WeightedCover:
    """LP value of the fractional cover and the blocks carrying positive weight"""
    lp = solve_content_lp(space, s, delta, tau, family)
    support = np.flatnonzero(lp.weights > 1e-12)
    return WeightedCover(value=lp.primal_value, blocks=tuple(lp.blocks[i] for i in support),
                         weights=tuple(float(lp.weights[i]) for i in support), family=lp.family)
