"""Blahut-Arimoto for finite sources, in slope and target-distortion modes.

Iterations run in the log domain. Every solution carries the dual pair
(lambda, a) read off the final output law, which makes the solver
self-certifying: R - (-a * D + sum mu log2 lambda) is bounded by the
stopping gap.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from meandim.config import config
from meandim.ratedist.information import DiscreteDistribution, JointDistribution, _mutual_information
from meandim.utils import DomainError, StructuralError, logger

LN2 = math.log(2.0)


@dataclass(eq=False)
class RDSolution:
    epsilon: float
    R: float
    D: float
    a: float
    channel: np.ndarray
    source: np.ndarray
    log2_lam: np.ndarray
    converged: bool
    iterations: int
    regime: str
    metadata: Dict = field(default_factory=dict)

    @property
    def lam(self) -> np.ndarray:
        return np.exp2(self.log2_lam)

    @property
    def lower_bound(self) -> float:
        """-a * eps + sum mu log2 lambda from the attached certificate"""
        return float(-self.a * self.epsilon + (self.source * self.log2_lam).sum())

    @property
    def joint(self) -> JointDistribution:
        return JointDistribution.from_matrix(self.source[:, None] * self.channel)

    def to_dict(self) -> Dict:
        return {"epsilon": self.epsilon, "R_bits": self.R, "D": self.D, "a": self.a,
                "converged": self.converged, "iterations": self.iterations, "regime": self.regime,
                "lower_bound": self.lower_bound, "metadata": self.metadata}


@dataclass
class _State:
    logq: np.ndarray
    a: float
    iterations: int
    converged: bool


class BlahutArimotoSolver:
    """Rate-distortion function of a finite source against a finite codebook"""

    def __init__(self, source, distortion, gap_tol: Optional[float] = None, max_iter: Optional[int] = None):
        mass = source.mass if isinstance(source, DiscreteDistribution) else np.asarray(source, dtype=float)
        D = np.asarray(distortion, dtype=float)
        if D.ndim != 2 or D.shape[0] != len(mass):
            raise StructuralError(f"distortion matrix shape {D.shape} does not match {len(mass)} source points",
                                  module="ratedist", stage="blahut_arimoto")
        if (D < 0).any():
            raise DomainError("distortion entries must be nonnegative", module="ratedist", stage="blahut_arimoto")
        if (mass < 0).any() or abs(mass.sum() - 1.0) > config.MASS_TOL:
            raise DomainError("source must be a probability vector", module="ratedist", stage="blahut_arimoto")
        keep = mass > 0
        self.p = mass[keep] / mass[keep].sum()
        self.D = D[keep]
        self.logp = np.log(self.p)
        self.m = D.shape[1]
        self.gap_tol = config.BA_GAP_TOL if gap_tol is None else gap_tol
        self.max_iter = config.BA_MAX_ITER if max_iter is None else max_iter

        rowmin = self.D.min(axis=1, keepdims=True)
        self.best_cells = self.D <= rowmin + 1e-12
        self.d_min = float(self.p @ rowmin[:, 0])
        column_means = self.p @ self.D
        self.best_constant = int(np.argmin(column_means))
        self.d_max = float(column_means[self.best_constant])

    # -- iterations ---------------------------------------------------------

    def _exponent(self, a: float, restricted: bool = False) -> np.ndarray:
        if restricted:
            return np.where(self.best_cells, 0.0, -np.inf)
        return -a * LN2 * self.D

    def _iterate(self, a: float, logq: Optional[np.ndarray] = None, restricted: bool = False) -> _State:
        E = self._exponent(a, restricted)
        if logq is None:
            logq = np.full(self.m, -math.log(self.m))
        else:
            # warm starts keep every codeword alive
            logq = np.logaddexp(logq + math.log1p(-1e-9), math.log(1e-9 / self.m))
        for it in range(1, self.max_iter + 1):
            log_alpha = logsumexp(logq[None, :] + E, axis=1)
            log_c = logsumexp(self.logp[:, None] + E - log_alpha[:, None], axis=0)
            q = np.exp(logq)
            live = q > 0
            gap = (log_c.max() - (q[live] * log_c[live]).sum()) / LN2
            if gap < self.gap_tol:
                return _State(logq, a, it, True)
            logq = logq + log_c
            logq -= logsumexp(logq)
        logger.warning(f"Blahut-Arimoto did not reach gap {self.gap_tol:g} within {self.max_iter} "
                       f"iterations at slope {a:g}")
        return _State(logq, a, self.max_iter, False)

    def _channel(self, state: _State, restricted: bool = False) -> np.ndarray:
        L = state.logq[None, :] + self._exponent(state.a, restricted)
        return np.exp(L - logsumexp(L, axis=1, keepdims=True))

    def _certificate(self, logq: np.ndarray, a: float) -> np.ndarray:
        """log2 lambda(x) = -log2(alpha_x max_y c(y)), feasible for the duality bound"""
        E = self._exponent(a)
        log_alpha = logsumexp(logq[None, :] + E, axis=1)
        log_c = logsumexp(self.logp[:, None] + E - log_alpha[:, None], axis=0)
        return -(log_alpha + log_c.max()) / LN2

    def _evaluate(self, channel: np.ndarray) -> Tuple[float, float]:
        return _mutual_information(self.p[:, None] * channel), float((self.p[:, None] * channel * self.D).sum())

    def _solution(self, eps: float, channel: np.ndarray, state: _State, iterations: int, converged: bool,
                  regime: str) -> RDSolution:
        R, D = self._evaluate(channel)
        return RDSolution(epsilon=eps, R=R, D=D, a=state.a, channel=channel, source=self.p,
                          log2_lam=self._certificate(state.logq, state.a), converged=converged,
                          iterations=iterations, regime=regime)

    # -- public modes -------------------------------------------------------

    def solve_slope(self, a: float) -> RDSolution:
        """Minimize I + a * E[d] (base-2); the distortion level is whatever the slope yields"""
        if a < 0:
            raise DomainError("slope a must be nonnegative", module="ratedist", stage="blahut_arimoto")
        state = self._iterate(a)
        channel = self._channel(state)
        _, D = self._evaluate(channel)
        return self._solution(D, channel, state, state.iterations, state.converged, "slope")

    def solve(self, eps: float) -> RDSolution:
        """R(eps) = min I(X; Y) subject to E d(X, Y) <= eps"""
        if eps < self.d_min - 1e-12:
            raise DomainError(f"target distortion {eps:g} is below the minimum achievable {self.d_min:g}",
                              module="ratedist", stage="blahut_arimoto")
        if eps >= self.d_max - 1e-12:
            channel = np.zeros((len(self.p), self.m))
            channel[:, self.best_constant] = 1.0
            state = _State(np.full(self.m, -math.log(self.m)), 0.0, 0, True)
            solution = self._solution(eps, channel, state, 0, True, "constant")
            solution.log2_lam = np.zeros(len(self.p))
            return solution

        restricted = self._iterate(0.0, restricted=True)
        restricted.a = config.BA_SLOPE_CAP
        floor_channel = self._channel(restricted, restricted=True)
        if eps <= self.d_min + 1e-12:
            return self._solution(eps, floor_channel, restricted, restricted.iterations,
                                  restricted.converged, "minimum-distortion")

        iterations = restricted.iterations
        converged = restricted.converged

        def run(a: float, warm: Optional[np.ndarray]) -> Tuple[_State, np.ndarray, float]:
            nonlocal iterations, converged
            st = self._iterate(a, warm)
            iterations += st.iterations
            converged = converged and st.converged
            ch = self._channel(st)
            return st, ch, self._evaluate(ch)[1]

        lo = (_State(np.full(self.m, -math.log(self.m)), 0.0, 0, True), None, math.inf)
        hi = None
        a, warm = 1.0, None
        while a <= config.BA_SLOPE_CAP:
            st, ch, D = run(a, warm)
            if D <= eps:
                hi = (st, ch, D)
                break
            lo, warm = (st, ch, D), st.logq
            a *= 2.0
        if hi is None:
            hi = (restricted, floor_channel, self.d_min)

        for _ in range(config.BA_BISECTION_STEPS):
            if hi[2] >= eps - 1e-10 * max(1.0, eps) or hi[0].a - lo[0].a <= 1e-12 * max(1.0, hi[0].a):
                break
            mid = 0.5 * (lo[0].a + hi[0].a)
            st, ch, D = run(mid, hi[0].logq)
            if D <= eps:
                hi = (st, ch, D)
            else:
                lo = (st, ch, D)

        state, channel, D_hi = hi
        regime = "bisection"
        if D_hi < eps - 1e-10 and lo[1] is not None:
            # linear piece of the curve: mix the two bracketing channels
            t = (lo[2] - eps) / (lo[2] - D_hi)
            channel = (1 - t) * lo[1] + t * channel
            regime = "mixture"
        solution = self._solution(eps, channel, state, iterations, converged, regime)
        logger.debug(f"BA eps={eps:g}: R={solution.R:.6f} bits at slope {state.a:.4g} ({regime}, "
                     f"{iterations} iterations)")
        return solution


def blahut_arimoto(source, distortion, eps: Optional[float] = None, a: Optional[float] = None) -> RDSolution:
    """Target mode when eps is given, slope mode when a is given"""
    if (eps is None) == (a is None):
        raise StructuralError("give exactly one of eps (target) or a (slope)", module="ratedist",
                              stage="blahut_arimoto")
    solver = BlahutArimotoSolver(source, distortion)
    return solver.solve(eps) if eps is not None else solver.solve_slope(a)
