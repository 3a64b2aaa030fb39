"""Algebraic actions from integer window constraints and their projective dimension"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.lattice import stacked_constraint
from meandim.systems.shift import ConstraintSpec, EnumerationPolicy, SystemSpec
from meandim.utils import DomainError, StructuralError, logger


@dataclass(frozen=True)
class AlgebraicActionSpec:
    """X = {x in (T^r)^Z : M (x_n, ..., x_{n+a-1}) = 0 for every n}, quantized to Z_q"""

    r: int
    a: int
    M: Tuple[Tuple[int, ...], ...]
    q: int
    W: int = 1
    label: str = ""

    def __post_init__(self):
        if self.r < 1 or self.a < 1 or self.q < 1 or self.W < 0:
            raise StructuralError("need r, a, q >= 1 and W >= 0", module="algebraic", stage="spec")
        rows = tuple(tuple(int(v) for v in row) for row in self.M)
        for row in rows:
            if len(row) != self.r * self.a:
                raise StructuralError(f"constraint rows need r*a = {self.r * self.a} entries, got {len(row)}",
                                      module="algebraic", stage="spec")
        object.__setattr__(self, "M", rows)

    @classmethod
    def from_dict(cls, data: Dict) -> "AlgebraicActionSpec":
        try:
            return cls(r=int(data["r"]), a=int(data["a"]), M=tuple(tuple(row) for row in data.get("M", [])),
                       q=int(data["q"]), W=int(data.get("W", 1)), label=str(data.get("label", "")))
        except (KeyError, TypeError, ValueError) as e:
            raise StructuralError(f"malformed action spec: {e}", module="algebraic", stage="spec") from e

    def matrix(self) -> np.ndarray:
        if not self.M:
            return np.zeros((0, self.r * self.a), dtype=np.int64)
        return np.asarray(self.M, dtype=np.int64)

    def to_system(self, policy: Optional[EnumerationPolicy] = None) -> SystemSpec:
        return SystemSpec(alphabet=AlphabetSpec.torus(self.r, self.q), W=self.W,
                          policy=policy or EnumerationPolicy(),
                          constraint=ConstraintSpec(window=self.a, matrix=self.M),
                          label=self.label or f"algebraic-r{self.r}-a{self.a}")

    def to_dict(self) -> Dict:
        return {"r": self.r, "a": self.a, "M": [list(row) for row in self.M], "q": self.q, "W": self.W}


@dataclass(frozen=True)
class ProjectionRank:
    N: int
    rank: int
    float_rank: int
    dim: int

    @property
    def ranks_agree(self) -> bool:
        return self.rank == self.float_rank


def projection_dimension(spec: AlgebraicActionSpec, N: int) -> ProjectionRank:
    """dim pi_N(X) = r N - rank of the (N - a + 1)-fold shifted stack of M"""
    if N < 1:
        raise DomainError("N must be >= 1", module="algebraic", stage="prodim")
    stack = stacked_constraint(spec.matrix(), spec.r, spec.a, N)
    if stack.shape[0] == 0:
        return ProjectionRank(N, 0, 0, spec.r * N)
    exact = int(sympy.Matrix(stack.tolist()).rank())
    approx = int(np.linalg.matrix_rank(stack.astype(float)))
    if exact != approx:
        logger.warning(f"floating rank {approx} differs from exact rank {exact} at N={N}; using the exact value")
    return ProjectionRank(N, exact, approx, spec.r * N - exact)


@dataclass
class ProdimResult:
    per_n: Dict[int, int]
    ranks: Dict[int, ProjectionRank] = field(default_factory=dict)

    @property
    def inf_estimate(self) -> float:
        return min(dim / N for N, dim in self.per_n.items())

    @property
    def increments(self) -> List[float]:
        ns = sorted(self.per_n)
        return [(self.per_n[b] - self.per_n[a]) / (b - a) for a, b in zip(ns, ns[1:])]

    @property
    def stabilized(self) -> bool:
        steps = self.increments
        return len(steps) >= 2 and abs(steps[-1] - steps[-2]) < 1e-12

    @property
    def value(self) -> float:
        """Stabilized increment when the last two agree, otherwise the inf over N"""
        return self.increments[-1] if self.stabilized else self.inf_estimate

    @property
    def ranks_agree(self) -> bool:
        return all(r.ranks_agree for r in self.ranks.values())

    def to_dict(self) -> Dict:
        return {"per_n": {str(n): d for n, d in sorted(self.per_n.items())}, "inf_estimate": self.inf_estimate,
                "increments": self.increments, "stabilized": self.stabilized, "value": self.value,
                "ranks_agree": self.ranks_agree}


def prodim(spec: AlgebraicActionSpec, n_list: Sequence[int]) -> ProdimResult:
    """dim pi_N(X) for every N and the projective dimension estimate"""
    ns = sorted(set(n_list))
    if not ns:
        raise DomainError("N list must be nonempty", module="algebraic", stage="prodim")
    if ns[0] < spec.a:
        raise DomainError(f"N must be >= a = {spec.a}, got {ns[0]}", module="algebraic", stage="prodim")
    ranks = {N: projection_dimension(spec, N) for N in ns}
    return ProdimResult(per_n={N: r.dim for N, r in ranks.items()}, ranks=ranks)


@dataclass
class SubadditivityReport:
    pairs: List[Dict] = field(default_factory=list)

    @property
    def violations(self) -> List[Dict]:
        return [p for p in self.pairs if not p["holds"]]

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {"pairs": self.pairs, "holds": self.holds}


def subadditivity_check(spec: AlgebraicActionSpec, n_list: Sequence[int]) -> SubadditivityReport:
    """dim pi_{M+N} <= dim pi_M + dim pi_N for all M <= N in the list with M + N also listed"""
    ns = sorted(set(n_list))
    listed = set(ns)
    dims: Dict[int, int] = {}

    def dim(n: int) -> int:
        if n not in dims:
            dims[n] = projection_dimension(spec, n).dim
        return dims[n]

    report = SubadditivityReport()
    for i, m in enumerate(ns):
        for n in ns[i:]:
            if m + n not in listed:
                continue
            report.pairs.append({"M": m, "N": n, "dim_sum": dim(m + n), "bound": dim(m) + dim(n),
                                 "holds": dim(m + n) <= dim(m) + dim(n)})
    return report
