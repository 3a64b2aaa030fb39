"""Optimal couplings of finite distributions via the transportation LP"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from meandim.config import config
from meandim.ratedist.information import DiscreteDistribution, JointDistribution
from meandim.utils import DomainError, NumericError, StructuralError, logger

HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
MARGINAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Coupling:
    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    mass: np.ndarray
    source: np.ndarray
    target: np.ndarray
    expected_cost: float

    @property
    def row_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    @property
    def marginal_error(self) -> float:
        return float(max(np.abs(self.row_marginal - self.source).max(),
                         np.abs(self.col_marginal - self.target).max()))

    def joint(self) -> JointDistribution:
        return JointDistribution(self.rows, self.cols, self.mass)

    def to_dict(self) -> Dict:
        i, j = np.nonzero(self.mass)
        return {"expected_cost": self.expected_cost, "marginal_error": self.marginal_error,
                "cells": [{"row": self.rows[a], "col": self.cols[b], "mass": float(self.mass[a, b])}
                          for a, b in zip(i, j)]}


def _as_distribution(value) -> DiscreteDistribution:
    if isinstance(value, DiscreteDistribution):
        return value
    return DiscreteDistribution(tuple(str(i) for i in range(len(value))), np.asarray(value, dtype=float))


def _fit_marginals(P: np.ndarray, mu: np.ndarray, nu: np.ndarray, rounds: int = 200) -> np.ndarray:
    """Alternate row and column rescaling until both marginals match to MARGINAL_TOL"""
    for _ in range(rounds):
        rows = P.sum(axis=1)
        P = P * np.divide(mu, rows, out=np.zeros_like(mu), where=rows > 0)[:, None]
        cols = P.sum(axis=0)
        P = P * np.divide(nu, cols, out=np.zeros_like(nu), where=cols > 0)[None, :]
        if np.abs(P.sum(axis=1) - mu).max() <= MARGINAL_TOL and np.abs(P.sum(axis=0) - nu).max() <= MARGINAL_TOL:
            break
    return P


def optimal_coupling(mu, nu, cost) -> Coupling:
    """Minimize sum P(x, y) cost(x, y) over couplings P of mu and nu"""
    mu, nu = _as_distribution(mu), _as_distribution(nu)
    C = np.asarray(cost, dtype=float)
    n, m = len(mu), len(nu)
    if C.shape != (n, m):
        raise StructuralError(f"cost matrix has shape {C.shape}, expected ({n}, {m})", module="ergodic",
                              stage="optimal_coupling")
    if (C < 0).any():
        raise DomainError("cost must be nonnegative", module="ergodic", stage="optimal_coupling")
    if abs(mu.mass.sum() - nu.mass.sum()) > config.MASS_TOL:
        raise DomainError("marginals carry different total mass", module="ergodic", stage="optimal_coupling")

    # P flattened row-major: row sums then column sums
    A_rows = sparse.kron(sparse.eye(n), np.ones((1, m)))
    A_cols = sparse.kron(np.ones((1, n)), sparse.eye(m))
    A_eq = sparse.vstack([A_rows, A_cols]).tocsr()
    b_eq = np.concatenate([mu.mass, nu.mass])
    res = linprog(C.ravel(), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=HIGHS_OPTIONS)
    if res.status != 0:
        raise NumericError(f"transportation LP failed: {res.message}", module="ergodic", stage="optimal_coupling")

    P = _fit_marginals(np.clip(res.x.reshape(n, m), 0.0, None), mu.mass, nu.mass)
    coupling = Coupling(rows=mu.support, cols=nu.support, mass=P, source=mu.mass, target=nu.mass,
                        expected_cost=float((P * C).sum()))
    logger.debug(f"optimal coupling {n}x{m}: cost {coupling.expected_cost:.6g}, "
                 f"marginal error {coupling.marginal_error:.1e}")
    return coupling
