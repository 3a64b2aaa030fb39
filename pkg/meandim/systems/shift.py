"""Window-truncated shift systems over quantized alphabets"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from meandim.config import config
from meandim.metric.space import FiniteMetricSpace
from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.lattice import SolutionGroup, stacked_constraint
from meandim.utils import CapacityError, DomainError, StructuralError, logger

TRANSFORMS = ("geometric",)


@dataclass(frozen=True)
class EnumerationPolicy:
    kind: str = "exhaustive"
    count: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("exhaustive", "sample"):
            raise StructuralError(f"unknown enumeration policy {self.kind!r}", module="systems",
                                  stage="policy")
        if self.kind == "sample" and (self.count < 1 or self.seed is None):
            raise StructuralError("sample policy needs count >= 1 and a seed", module="systems",
                                  stage="policy")

    @classmethod
    def sample(cls, count: int, seed: int) -> "EnumerationPolicy":
        return cls(kind="sample", count=count, seed=seed)

    def to_dict(self) -> Dict:
        if self.kind == "exhaustive":
            return {"kind": "exhaustive"}
        return {"kind": "sample", "count": self.count, "seed": self.seed}


@dataclass(frozen=True)
class ConstraintSpec:
    """Window constraint M (x_n, ..., x_{n+a-1}) = 0 on torus coordinates"""

    window: int
    matrix: Tuple[Tuple[int, ...], ...]

    def array(self, r: int) -> np.ndarray:
        if not self.matrix:
            return np.zeros((0, r * self.window), dtype=np.int64)
        M = np.asarray(self.matrix, dtype=np.int64)
        if M.ndim != 2 or M.shape[1] != r * self.window:
            raise StructuralError(f"constraint matrix must have r*a = {r * self.window} columns",
                                  module="systems", stage="constraint")
        return M

    def to_dict(self) -> Dict:
        return {"a": self.window, "M": [list(row) for row in self.matrix]}


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Finite words x_{-W} .. x_{W+depth-1} standing for points of a shift space"""

    alphabet: AlphabetSpec
    W: int
    policy: EnumerationPolicy = field(default_factory=EnumerationPolicy)
    transform: Optional[str] = None
    constraint: Optional[ConstraintSpec] = None
    label: str = ""

    def __post_init__(self):
        if self.W < 0:
            raise StructuralError("window W must be >= 0", module="systems", stage="construct")
        if self.transform is not None and self.transform not in TRANSFORMS:
            raise StructuralError(f"unknown transform {self.transform!r}", module="systems",
                                  stage="construct")
        if self.transform == "geometric" and self.alphabet.kind != "explicit":
            raise StructuralError("the geometric transform acts on explicit harmonic alphabets",
                                  module="systems", stage="construct")
        if self.constraint is not None and self.alphabet.kind != "torus":
            raise StructuralError("algebraic constraints need a torus alphabet", module="systems",
                                  stage="construct")

    # -- symbols ------------------------------------------------------------

    @property
    def symbol_count(self) -> int:
        return self.alphabet.size

    def coordinate_values(self) -> np.ndarray:
        """Real symbol values after the coordinate transform, if any"""
        values = self.alphabet.real_values()
        if self.transform == "geometric":
            out = np.zeros_like(values)
            for i, v in enumerate(values):
                if v > 0:
                    n = int(round(1.0 / v))
                    if abs(1.0 / n - v) > 1e-12:
                        raise StructuralError(f"value {v} is not of the form 1/n", module="systems",
                                              stage="transform")
                    out[i] = 2.0 ** -n
            return out
        return values

    @cached_property
    def symbol_distances(self) -> np.ndarray:
        if self.alphabet.kind == "torus":
            dist = self.alphabet.distance_matrix()
        else:
            dist = self.alphabet.distance_matrix(self.coordinate_values())
        dist.setflags(write=False)
        return dist

    @property
    def symbol_diameter(self) -> float:
        return float(self.symbol_distances.max())

    def window_weights(self) -> np.ndarray:
        return 2.0 ** -np.abs(np.arange(-self.W, self.W + 1))

    def word_length(self, depth: int = 1) -> int:
        return 2 * self.W + depth

    def truncation_error(self) -> float:
        return 2.0 ** (1 - self.W) * self.symbol_diameter

    def diameter_bound(self) -> float:
        return float(self.window_weights().sum()) * self.symbol_diameter

    # -- points -------------------------------------------------------------

    def solution_group(self, depth: int = 1) -> SolutionGroup:
        r, q = self.alphabet.dimension, self.alphabet.resolution
        M = self.constraint.array(r)
        A = stacked_constraint(M, r, self.constraint.window, self.word_length(depth))
        return SolutionGroup.from_matrix(A, q)

    def exhaustive_count(self, depth: int = 1) -> int:
        if self.constraint is not None:
            return self.solution_group(depth).order
        return self.symbol_count ** self.word_length(depth)

    def words(self, depth: int = 1) -> np.ndarray:
        """Symbol-index words of length 2W + depth under the enumeration policy"""
        if depth < 1:
            raise DomainError("depth must be >= 1", module="systems", stage="words")
        if depth not in self._word_cache:
            self._word_cache[depth] = self._words(depth)
        return self._word_cache[depth]

    @cached_property
    def _word_cache(self) -> Dict[int, np.ndarray]:
        # lives in the instance __dict__ and is freed with it
        return {}

    def _words(self, depth: int) -> np.ndarray:
        length = self.word_length(depth)
        if self.policy.kind == "exhaustive":
            count = self.exhaustive_count(depth)
            if count > config.ENUMERATION_BUDGET:
                raise CapacityError(
                    f"exhaustive enumeration of {count} words exceeds ENUMERATION_BUDGET="
                    f"{config.ENUMERATION_BUDGET} (env MEANDIM_BUDGET_POINTS); use a sample policy",
                    module="systems", stage="words")
            if self.constraint is not None:
                words = self._group_words(self.solution_group(depth).enumerate(), length)
            else:
                m = self.symbol_count
                grid = np.unravel_index(np.arange(m ** length), (m,) * length)
                words = np.stack(grid, axis=1).astype(np.int64).reshape(-1, length)
        else:
            rng = np.random.default_rng(self.policy.seed)
            if self.constraint is not None:
                draws = self._group_words(self.solution_group(depth).sample(self.policy.count, rng), length)
            else:
                draws = rng.integers(0, self.symbol_count, size=(self.policy.count, length))
            _, first = np.unique(draws, axis=0, return_index=True)
            words = draws[np.sort(first)].astype(np.int64)
            logger.debug(f"sampled {len(words)} distinct words of length {length} (seed {self.policy.seed})")
        words.setflags(write=False)
        return words

    def _group_words(self, vectors: np.ndarray, length: int) -> np.ndarray:
        r, q = self.alphabet.dimension, self.alphabet.resolution
        coords = vectors.reshape(len(vectors), length, r)
        return (coords * (q ** np.arange(r))).sum(axis=2).astype(np.int64)

    def point_ids(self, words: np.ndarray) -> Tuple[str, ...]:
        if self.symbol_count <= 10:
            return tuple("".join(str(s) for s in row) for row in words.tolist())
        return tuple(".".join(str(s) for s in row) for row in words.tolist())

    def window_distance(self, rows: np.ndarray, cols: np.ndarray, offset: int = 0) -> np.ndarray:
        """d(T^offset x, T^offset y) for every row word x and column word y"""
        S = self.symbol_distances
        out = np.zeros((len(rows), len(cols)))
        for i, weight in enumerate(self.window_weights()):
            j = offset + i
            out += weight * S[np.ix_(rows[:, j], cols[:, j])]
        return out

    def window_distance_from(self, word: np.ndarray, words: np.ndarray, offset: int = 0) -> np.ndarray:
        S = self.symbol_distances
        out = np.zeros(len(words))
        for i, weight in enumerate(self.window_weights()):
            j = offset + i
            out += weight * S[word[j], words[:, j]]
        return out

    def base_metric(self) -> FiniteMetricSpace:
        words = self.words(1)
        return FiniteMetricSpace(self.point_ids(words), self.window_distance(words, words),
                                 self.label or "system")

    def to_dict(self) -> Dict:
        data = {"alphabet": self.alphabet.to_dict(), "W": self.W, "policy": self.policy.to_dict()}
        if self.transform:
            data["transform"] = self.transform
        if self.constraint is not None:
            data["constraint"] = self.constraint.to_dict()
        return data


def build_full_shift(alphabet: AlphabetSpec, W: int, policy: Optional[EnumerationPolicy] = None,
                     label: str = "") -> SystemSpec:
    """Full shift over a quantized alphabet truncated to coordinates -W..W"""
    policy = policy or EnumerationPolicy()
    system = SystemSpec(alphabet=alphabet, W=W, policy=policy, label=label or f"full-shift-{alphabet.size}")
    if policy.kind == "exhaustive" and alphabet.size ** (2 * W + 1) > config.ENUMERATION_BUDGET:
        raise CapacityError(
            f"{alphabet.size}^{2 * W + 1} words exceed ENUMERATION_BUDGET={config.ENUMERATION_BUDGET} "
            f"(env MEANDIM_BUDGET_POINTS)", module="systems", stage="build_full_shift")
    return system


def build_sequence_example(k: int, variant: str = "harmonic", W: int = 3,
                           policy: Optional[EnumerationPolicy] = None) -> SystemSpec:
    """Shift over {1, 1/2, ..., 1/k, 0}; the geometric variant measures f(1/n) = 2^-n"""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}", module="systems", stage="build_sequence_example")
    if variant not in ("harmonic", "geometric"):
        raise StructuralError(f"unknown variant {variant!r}", module="systems", stage="build_sequence_example")
    values = [1.0 / n for n in range(1, k + 1)] + [0.0]
    policy = policy or EnumerationPolicy()
    return SystemSpec(alphabet=AlphabetSpec.explicit(values), W=W, policy=policy,
                      transform="geometric" if variant == "geometric" else None,
                      label=f"{variant}-{k}")


def truncation_error(system: SystemSpec) -> float:
    """sum_{|n| > W} 2^-|n| diam = 2^(1-W) diam"""
    return system.truncation_error()
