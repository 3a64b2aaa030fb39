"""Smith normal form and finite solution groups of M v = 0 (mod q)"""

import math
from dataclasses import dataclass
from functools import reduce
from typing import Tuple

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from meandim.utils import DomainError, StructuralError


def _to_array(M: DomainMatrix) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in M.to_list()], dtype=object).reshape(M.shape)


@dataclass(frozen=True)
class SmithForm:
    """D == left @ A @ right with left, right unimodular and D diagonal, d_1 | d_2 | ..."""

    D: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return tuple(abs(int(self.D[i, i])) for i in range(min(self.D.shape)))


def normal_form(A: np.ndarray) -> SmithForm:
    """Smith normal form of an integer matrix, with exact integer transforms"""
    A = np.asarray(A)
    if A.ndim != 2:
        raise StructuralError("normal_form expects a 2-D integer matrix", module="algebraic",
                              stage="normal_form")
    rows = [[ZZ(int(x)) for x in row] for row in A.tolist()]
    D, left, right = smith_normal_decomp(DomainMatrix(rows, A.shape, ZZ))
    return SmithForm(D=_to_array(D), left=_to_array(left), right=_to_array(right))


def stacked_constraint(matrix: np.ndarray, r: int, window: int, length: int) -> np.ndarray:
    """Rows of M applied at every window start 0..length-window over r*length columns"""
    M = np.asarray(matrix, dtype=np.int64).reshape(-1, r * window) if np.size(matrix) else \
        np.zeros((0, r * window), dtype=np.int64)
    starts = max(length - window + 1, 0)
    stacked = np.zeros((M.shape[0] * starts, r * length), dtype=np.int64)
    for n in range(starts):
        stacked[n * M.shape[0]:(n + 1) * M.shape[0], r * n:r * (n + window)] = M
    return stacked


@dataclass(frozen=True, eq=False)
class SolutionGroup:
    """The finite group {v in Z_q^n : A v = 0 (mod q)} in normal-form coordinates"""

    q: int
    n: int
    diagonal: Tuple[int, ...]
    basis: np.ndarray  # right transform reduced mod q, v = basis @ w

    @classmethod
    def from_matrix(cls, A: np.ndarray, q: int) -> "SolutionGroup":
        A = np.asarray(A, dtype=np.int64)
        form = normal_form(A)
        # A v = left^-1 D w for v = right w, so v solves mod q exactly when every d_i w_i does
        basis = np.array([[int(x) % q for x in row] for row in form.right], dtype=np.int64).reshape(A.shape[1], A.shape[1])
        return cls(q=q, n=A.shape[1], diagonal=form.invariant_factors, basis=basis)

    def choices(self) -> Tuple[Tuple[int, int], ...]:
        """(number of values, step) for every normal-form coordinate"""
        out = []
        for i in range(self.n):
            if i < len(self.diagonal):
                g = math.gcd(self.diagonal[i], self.q)
                out.append((g, self.q // g))
            else:
                out.append((self.q, 1))
        return tuple(out)

    @property
    def order(self) -> int:
        return reduce(lambda acc, c: acc * c[0], self.choices(), 1)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def torsion(self) -> int:
        return reduce(lambda acc, d: acc * d, [d for d in self.diagonal if d != 0], 1)

    def compatible(self) -> bool:
        return all(self.q % d == 0 for d in self.diagonal if d != 0)

    def suggested_resolution(self) -> int:
        return reduce(lambda acc, d: acc * d // math.gcd(acc, d), [d for d in self.diagonal if d != 0], self.q)

    def require_compatible(self):
        if not self.compatible():
            raise DomainError(
                f"resolution q={self.q} does not resolve the elementary divisors {self.diagonal}; "
                f"use a multiple of {self.suggested_resolution()}",
                module="algebraic", stage="haar_measure")

    def _to_vectors(self, w: np.ndarray) -> np.ndarray:
        return (w @ self.basis.T) % self.q

    def enumerate(self) -> np.ndarray:
        """All group elements, in lexicographic order of normal-form coordinates"""
        grids = [np.arange(count) * step for count, step in self.choices()]
        if not grids:
            return np.zeros((1, 0), dtype=np.int64)
        mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, self.n)
        return self._to_vectors(mesh.astype(np.int64))

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform draws from the group"""
        columns = [rng.integers(0, c, size=count) * step for c, step in self.choices()]
        if not columns:
            return np.zeros((count, 0), dtype=np.int64)
        return self._to_vectors(np.stack(columns, axis=1).astype(np.int64))

    def contains(self, A: np.ndarray, v: np.ndarray) -> bool:
        return bool(((np.asarray(A, dtype=np.int64) @ np.asarray(v, dtype=np.int64)) % self.q == 0).all())
