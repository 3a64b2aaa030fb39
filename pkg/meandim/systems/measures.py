"""Probability measures on the word representation of a shift system"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from meandim.config import config
from meandim.systems.shift import SystemSpec
from meandim.utils import CapacityError, DomainError, StructuralError

PROVENANCE = ("frostman", "averaged", "product", "haar", "custom")


def aggregate(words: np.ndarray, mass: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Merge repeated words, summing their mass; words come back sorted"""
    unique, inverse = np.unique(words, axis=0, return_inverse=True)
    return unique, np.bincount(inverse.reshape(-1), weights=mass, minlength=len(unique))


@dataclass(eq=False)
class MeasureOnSystem:
    """Mass on depth-`depth` words; product and Haar measures may stay unexpanded"""

    system: SystemSpec
    depth: int
    words: Optional[np.ndarray] = None
    mass: Optional[np.ndarray] = None
    provenance: str = "custom"
    symbol_weights: Optional[np.ndarray] = None
    metadata: Dict = field(default_factory=dict)
    lazy: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise StructuralError(f"unknown provenance {self.provenance!r}", module="ergodic", stage="measure")
        if self.words is None:
            lazy = self.provenance == "haar" or (self.provenance == "product" and self.symbol_weights is not None)
            if not lazy:
                raise StructuralError("only product and Haar measures may omit their support", module="ergodic",
                                      stage="measure")
            self.lazy = True
            return
        words = np.asarray(self.words, dtype=np.int64)
        mass = np.asarray(self.mass, dtype=float)
        if words.ndim != 2 or words.shape[0] != mass.shape[0]:
            raise StructuralError("words and mass disagree in length", module="ergodic", stage="measure")
        if words.shape[1] != self.system.word_length(self.depth):
            raise StructuralError(f"words must have length {self.system.word_length(self.depth)}",
                                  module="ergodic", stage="measure")
        if (mass < 0).any():
            raise StructuralError("negative mass", module="ergodic", stage="measure")
        total = mass.sum()
        if abs(total - 1.0) > 1e-9:
            raise StructuralError(f"measure has total mass {total}, expected 1", module="ergodic",
                                  stage="measure")
        self.words = words
        self.mass = mass / total

    # -- support ------------------------------------------------------------

    def support(self) -> Tuple[np.ndarray, np.ndarray]:
        """(words, mass) with zero-mass words dropped"""
        if self.words is None:
            self.words, self.mass = self._expand()
        keep = self.mass > 0
        return self.words[keep], self.mass[keep]

    def _expand(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.provenance == "haar":
            words = self.system.words(self.depth)
            return words, np.full(len(words), 1.0 / len(words))
        length = self.system.word_length(self.depth)
        count = self.system.symbol_count ** length
        if count > config.ENUMERATION_BUDGET:
            raise CapacityError(
                f"expanding a product measure over {count} words exceeds ENUMERATION_BUDGET="
                f"{config.ENUMERATION_BUDGET} (env MEANDIM_BUDGET_POINTS)", module="ergodic",
                stage="measure")
        m = self.system.symbol_count
        words = np.stack(np.unravel_index(np.arange(count), (m,) * length), axis=1).astype(np.int64)
        mass = np.prod(self.symbol_weights[words], axis=1)
        return words, mass / mass.sum()

    @property
    def support_size(self) -> int:
        return len(self.support()[0])

    def marginal(self, depth: int) -> "MeasureOnSystem":
        """Law of the first 2W + depth coordinates"""
        if depth == self.depth:
            return self
        if self.lazy:
            return MeasureOnSystem(self.system, depth, provenance=self.provenance,
                                   symbol_weights=self.symbol_weights, metadata=dict(self.metadata))
        if depth > self.depth:
            raise DomainError(f"measure defined at depth {self.depth} cannot be read at depth {depth}",
                              module="ergodic", stage="marginal")
        length = self.system.word_length(depth)
        words, mass = aggregate(self.words[:, :length], self.mass)
        return MeasureOnSystem(self.system, depth, words, mass, self.provenance,
                               self.symbol_weights, dict(self.metadata))

    def cylinder_masses(self, positions: Sequence[int]) -> Dict[Tuple[int, ...], float]:
        words, mass = self.support()
        cylinders, totals = aggregate(words[:, list(positions)], mass)
        return {tuple(int(s) for s in row): float(m) for row, m in zip(cylinders, totals)}

    def distribution(self):
        """The measure as a DiscreteDistribution over point identifiers"""
        from meandim.ratedist.information import DiscreteDistribution

        words, mass = self.support()
        return DiscreteDistribution(self.system.point_ids(words), mass)

    def to_dict(self) -> Dict:
        data = {"depth": self.depth, "provenance": self.provenance, "metadata": self.metadata}
        if self.lazy:
            if self.symbol_weights is not None:
                data["symbol_weights"] = self.symbol_weights.tolist()
            return data
        words, mass = self.support()
        data["points"] = list(self.system.point_ids(words))
        data["mass"] = mass.tolist()
        return data


def product_measure(system: SystemSpec, depth: int, weights: Optional[Sequence[float]] = None) -> MeasureOnSystem:
    """Bernoulli measure with the given symbol weights (uniform by default)"""
    m = system.symbol_count
    w = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (m,) or (w < 0).any() or abs(w.sum() - 1.0) > 1e-9:
        raise StructuralError(f"symbol weights must be a probability vector of length {m}",
                              module="ergodic", stage="product_measure")
    if system.constraint is not None:
        raise DomainError("product measures live on unconstrained shifts", module="ergodic",
                          stage="product_measure")
    return MeasureOnSystem(system, depth, provenance="product", symbol_weights=w / w.sum())


def delta_measure(system: SystemSpec, word: Sequence[int], depth: int = 1) -> MeasureOnSystem:
    word = np.asarray(word, dtype=np.int64).reshape(1, -1)
    return MeasureOnSystem(system, depth, word, np.ones(1), provenance="custom")


def uniform_measure(system: SystemSpec, depth: int = 1) -> MeasureOnSystem:
    """Uniform mass on the system's enumerated (or sampled) depth words"""
    words = system.words(depth)
    return MeasureOnSystem(system, depth, words, np.full(len(words), 1.0 / len(words)), provenance="custom")
