"""Block rate-distortion R(d, mu, eps) on shift systems and the rate-distortion dimension"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from meandim.config import config
from meandim.estimation.slope import DimensionEstimate, estimate_dimension
from meandim.ratedist.blahut import BlahutArimotoSolver, RDSolution
from meandim.ratedist.information import mutual_information_of
from meandim.systems.measures import MeasureOnSystem
from meandim.systems.orbit import orbit_distances
from meandim.systems.shift import SystemSpec
from meandim.utils import CapacityError, DomainError, StructuralError, logger

METHODS = ("auto", "dense", "separable", "homogeneous")
LN2 = math.log(2.0)


@dataclass(frozen=True)
class RDPoint:
    epsilon: float
    N: int
    R_bits: float
    D: float
    converged: bool
    iterations: int
    method: str
    regime: str
    lower_bound: float

    def to_dict(self) -> Dict:
        return {"epsilon": self.epsilon, "N": self.N, "R_bits": self.R_bits, "D": self.D,
                "converged": self.converged, "iterations": self.iterations, "method": self.method,
                "regime": self.regime, "lower_bound": self.lower_bound}


@dataclass
class RDCurve:
    points: List[RDPoint] = field(default_factory=list)
    source: Dict = field(default_factory=dict)

    CSV_COLUMNS = ["epsilon", "N", "R_bits", "converged", "iterations"]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([p.to_dict() for p in self.points])
        if frame.empty:
            return pd.DataFrame(columns=self.CSV_COLUMNS)
        extra = [c for c in frame.columns if c not in self.CSV_COLUMNS]
        return frame[self.CSV_COLUMNS + extra]

    @property
    def unconverged(self) -> List[RDPoint]:
        return [p for p in self.points if not p.converged]

    def monotone(self, tol: float = 1e-6) -> bool:
        """R nonincreasing in eps at every fixed N"""
        for N in {p.N for p in self.points}:
            ordered = sorted((p for p in self.points if p.N == N), key=lambda p: p.epsilon)
            if any(b.R_bits > a.R_bits + tol for a, b in zip(ordered, ordered[1:])):
                return False
        return True

    def to_dict(self) -> Dict:
        return {"source": self.source, "points": [p.to_dict() for p in self.points],
                "monotone": self.monotone()}


def coordinate_weights(system: SystemSpec, N: int) -> np.ndarray:
    """c_j with d̄_N(x, y) = sum_j c_j rho(x_j, y_j) on words of length 2W + N"""
    weights = system.window_weights()
    c = np.zeros(system.word_length(N))
    for n in range(N):
        c[n:n + len(weights)] += weights
    return c / N


def _at_depth(measure: MeasureOnSystem, N: int) -> MeasureOnSystem:
    if measure.lazy:
        return measure.marginal(N)
    if measure.depth < N:
        raise DomainError(f"measure defined at depth {measure.depth} cannot feed blocks of depth {N}",
                          module="ratedist", stage="dynamical_rd")
    return measure.marginal(N)


# -- dense ----------------------------------------------------------------------

def _dense(system: SystemSpec, measure: MeasureOnSystem, N: int, eps: float,
           codebook: Optional[np.ndarray]) -> RDPoint:
    words, mass = _at_depth(measure, N).support()
    code = words if codebook is None else np.asarray(codebook, dtype=np.int64)
    if len(words) * len(code) > config.DENSE_RD_BUDGET ** 2:
        raise CapacityError(
            f"dense block problem {len(words)} x {len(code)} exceeds DENSE_RD_BUDGET={config.DENSE_RD_BUDGET} "
            f"(env MEANDIM_DENSE_RD_POINTS)", module="ratedist", stage="dynamical_rd")
    distortion = orbit_distances(system, words, code, N, "avg")
    solution = BlahutArimotoSolver(mass, distortion).solve(eps)
    return _point(solution, N, "dense")


def _point(solution: RDSolution, N: int, method: str) -> RDPoint:
    return RDPoint(epsilon=solution.epsilon, N=N, R_bits=solution.R / N, D=solution.D,
                   converged=solution.converged, iterations=solution.iterations, method=method,
                   regime=solution.regime, lower_bound=solution.lower_bound / N)


# -- separable ------------------------------------------------------------------

class SeparableRD:
    """Product source, additive distortion: per-coordinate problems at slopes a * c_j"""

    def __init__(self, system: SystemSpec, symbol_weights: np.ndarray, N: int):
        self.N = N
        c = coordinate_weights(system, N)
        self.levels, self.counts = np.unique(np.round(c, 15), return_counts=True)
        self.solver = BlahutArimotoSolver(symbol_weights, system.symbol_distances)
        self._cache: Dict[float, List[RDSolution]] = {}

    def at_slope(self, a: float) -> Tuple[float, float, List[RDSolution]]:
        if a not in self._cache:
            self._cache[a] = [self.solver.solve_slope(a * c) for c in self.levels]
        parts = self._cache[a]
        R = float(sum(k * s.R for k, s in zip(self.counts, parts)))
        D = float(sum(k * c * s.D for k, c, s in zip(self.counts, self.levels, parts)))
        return R, D, parts

    def _certificate(self, parts: List[RDSolution]) -> float:
        return float(sum(k * (s.source * s.log2_lam).sum() for k, s in zip(self.counts, parts)))

    def solve(self, eps: float) -> RDPoint:
        d_max = float((self.counts * self.levels).sum() * self.solver.d_max)
        if eps >= d_max - 1e-12:
            return RDPoint(eps, self.N, 0.0, d_max, True, 0, "separable", "constant", 0.0)
        if eps <= 1e-15:
            floor = self.solver.solve(0.0)
            R = float(self.counts.sum() * floor.R)
            _, _, parts = self.at_slope(config.BA_SLOPE_CAP)
            bound = self._certificate(parts)
            return RDPoint(eps, self.N, R / self.N, 0.0, floor.converged, floor.iterations, "separable",
                           "minimum-distortion", bound / self.N)

        lo_a, lo = 0.0, None
        hi_a, hi = None, None
        a = 1.0
        while a <= config.BA_SLOPE_CAP:
            state = self.at_slope(a)
            if state[1] <= eps:
                hi_a, hi = a, state
                break
            lo_a, lo = a, state
            a *= 2.0
        if hi is None:
            hi_a, hi = config.BA_SLOPE_CAP, self.at_slope(config.BA_SLOPE_CAP)

        for _ in range(config.BA_BISECTION_STEPS):
            if hi[1] >= eps - 1e-10 * max(1.0, eps) or hi_a - lo_a <= 1e-12 * hi_a:
                break
            mid = 0.5 * (lo_a + hi_a)
            state = self.at_slope(mid)
            if state[1] <= eps:
                hi_a, hi = mid, state
            else:
                lo_a, lo = mid, state

        R, D, parts = hi
        regime = "bisection"
        if D > eps:
            # the cap slope is still too coarse: share time with the lossless code
            t = (D - eps) / D
            lossless = float(self.counts.sum() * self.solver.solve(0.0).R)
            R, D, regime = (1 - t) * R + t * lossless, eps, "mixture"
        elif D < eps - 1e-10 and lo is not None:
            t = (lo[1] - eps) / (lo[1] - D)
            R = float(sum(k * mutual_information_of(s_hi.source, (1 - t) * s_lo.channel + t * s_hi.channel)
                          for k, s_lo, s_hi in zip(self.counts, lo[2], parts)))
            D, regime = eps, "mixture"
        solutions = [s for a_, sols in self._cache.items() for s in sols]
        bound = -hi_a * eps + self._certificate(parts)
        return RDPoint(eps, self.N, R / self.N, D, all(s.converged for s in solutions),
                       sum(s.iterations for s in solutions), "separable", regime, bound / self.N)


# -- homogeneous ----------------------------------------------------------------

class GroupRD:
    """Uniform law on a quantized solution group with translation-invariant d̄_N.

    The optimal channel adds Gibbs noise p_a(z) ~ 2^(-a d(0, z)) over the group,
    so R = log2|G| - a D - log2 Z_a. Z_a and D come from a transfer-matrix pass
    over windows of the defining constraint, never from the group's elements.
    """

    def __init__(self, system: SystemSpec, N: int):
        if system.alphabet.kind != "torus":
            raise DomainError("homogeneous rate distortion needs a torus alphabet", module="ratedist",
                              stage="dynamical_rd")
        self.N = N
        self.c = coordinate_weights(system, N)
        self.rho0 = system.symbol_distances[0]
        alphabet = system.alphabet
        m, r, q = alphabet.size, alphabet.dimension, alphabet.resolution
        constraint = system.constraint
        matrix = constraint.array(r) if constraint is not None else np.zeros((0, r))
        window = constraint.window if constraint is not None and matrix.shape[0] else 1
        if m ** window > config.TRANSFER_BUDGET:
            raise CapacityError(f"transfer windows {m}^{window} exceed TRANSFER_BUDGET={config.TRANSFER_BUDGET}",
                                module="ratedist", stage="dynamical_rd")
        self.k = window - 1
        coords = alphabet.torus_coordinates()
        total = np.zeros((m,) * window + (matrix.shape[0],), dtype=np.int64)
        for i in range(window):
            part = coords @ matrix[:, r * i:r * (i + 1)].T
            shape = [1] * window + [matrix.shape[0]]
            shape[i] = m
            total = total + part.reshape(shape)
        valid = (total % q == 0).all(axis=-1)
        self.logvalid = np.where(valid, 0.0, -np.inf)
        self.log2_order = self.partition(0.0)[0]

    def partition(self, a: float) -> Tuple[float, float]:
        """(log2 Z_a, expected d̄_N under the Gibbs law)"""
        with np.errstate(divide="ignore"):
            logcost = np.log(self.c[:, None] * self.rho0[None, :])
        logw = -a * LN2 * self.c[:, None] * self.rho0[None, :]
        logA = np.zeros(())
        logB = np.full((), -np.inf)
        L = len(self.c)
        for j in range(min(self.k, L)):
            logB = np.logaddexp(logB[..., None] + logw[j], logA[..., None] + logcost[j] + logw[j])
            logA = logA[..., None] + logw[j]
        for j in range(self.k, L):
            tmpB = np.logaddexp(logB[..., None] + logw[j], logA[..., None] + logcost[j] + logw[j]) + self.logvalid
            tmpA = logA[..., None] + logw[j] + self.logvalid
            logA = logsumexp(tmpA, axis=0)
            logB = logsumexp(tmpB, axis=0)
        logZ = float(logsumexp(logA))
        with np.errstate(divide="ignore"):
            logBtot = float(logsumexp(logB)) if np.isfinite(logB).any() else -np.inf
        return logZ / LN2, float(np.exp(logBtot - logZ))

    def _rate(self, a: float) -> Tuple[float, float, float]:
        log2Z, D = self.partition(a)
        return self.log2_order - a * D - log2Z, D, log2Z

    def solve(self, eps: float) -> RDPoint:
        R0, d_max, _ = self._rate(0.0)
        if eps >= d_max - 1e-12:
            return RDPoint(eps, self.N, 0.0, d_max, True, 0, "homogeneous", "constant", 0.0)
        if eps <= 1e-15:
            _, _, log2Z = self._rate(config.BA_SLOPE_CAP)
            bound = self.log2_order - log2Z
            return RDPoint(eps, self.N, self.log2_order / self.N, 0.0, True, 0, "homogeneous",
                           "minimum-distortion", bound / self.N)

        steps = 0
        lo_a, hi_a = 0.0, 1.0
        hi = self._rate(hi_a)
        while hi[1] > eps and hi_a < config.BA_SLOPE_CAP:
            lo_a, hi_a = hi_a, hi_a * 2
            hi = self._rate(hi_a)
            steps += 1
        regime = "bisection"
        if hi[1] > eps:
            # the cap slope is still too coarse: share time with the identity channel
            t = (hi[1] - eps) / hi[1]
            R = (1 - t) * hi[0] + t * self.log2_order
            bound = -hi_a * eps + self.log2_order - hi[2]
            return RDPoint(eps, self.N, R / self.N, eps, True, steps, "homogeneous", "mixture", bound / self.N)
        for _ in range(config.BA_BISECTION_STEPS):
            if hi[1] >= eps - 1e-12 * max(1.0, eps):
                break
            mid = 0.5 * (lo_a + hi_a)
            state = self._rate(mid)
            steps += 1
            if state[1] <= eps:
                hi_a, hi = mid, state
            else:
                lo_a = mid
        R, D, log2Z = hi
        bound = -hi_a * eps + self.log2_order - log2Z
        return RDPoint(eps, self.N, max(R, 0.0) / self.N, D, True, steps, "homogeneous", regime, bound / self.N)


# -- public ---------------------------------------------------------------------

def resolve_method(measure: MeasureOnSystem, method: str, codebook=None) -> str:
    if method not in METHODS:
        raise StructuralError(f"unknown method {method!r}", module="ratedist", stage="dynamical_rd")
    if method != "auto":
        return method
    if codebook is not None:
        return "dense"
    if measure.provenance == "product":
        return "separable"
    if measure.provenance == "haar":
        return "homogeneous"
    return "dense"


def dynamical_rd(system: SystemSpec, measure: MeasureOnSystem, N: int, eps: float, method: str = "auto",
                 codebook: Optional[np.ndarray] = None) -> RDPoint:
    """min I(X; Y) / N over block channels with E d̄_N(X, Y) <= eps"""
    if N < 1:
        raise DomainError("N must be >= 1", module="ratedist", stage="dynamical_rd")
    if measure.system is not system:
        raise StructuralError("measure belongs to another system", module="ratedist", stage="dynamical_rd")
    method = resolve_method(measure, method, codebook)
    if method == "separable":
        if measure.provenance != "product":
            raise DomainError("separable method needs a product measure", module="ratedist", stage="dynamical_rd")
        return SeparableRD(system, measure.symbol_weights, N).solve(eps)
    if method == "homogeneous":
        if measure.provenance != "haar":
            raise DomainError("homogeneous method needs a Haar measure", module="ratedist", stage="dynamical_rd")
        return GroupRD(system, N).solve(eps)
    return _dense(system, measure, N, eps, codebook)


def rd_curve(system: SystemSpec, measure: MeasureOnSystem, eps_grid: Sequence[float], n_list: Sequence[int],
             method: str = "auto", codebook: Optional[np.ndarray] = None) -> RDCurve:
    """dynamical_rd over the grid, ordered by (N, decreasing eps); one solver per N"""
    if not eps_grid or not n_list:
        raise DomainError("eps grid and N list must be nonempty", module="ratedist", stage="rd_curve")
    resolved = resolve_method(measure, method, codebook)
    curve = RDCurve(source={"system": system.to_dict(), "provenance": measure.provenance, "method": resolved})
    for N in sorted(set(n_list)):
        if resolved == "separable":
            engine = SeparableRD(system, measure.symbol_weights, N)
        elif resolved == "homogeneous":
            engine = GroupRD(system, N)
        else:
            engine = None
        for eps in sorted(set(eps_grid), reverse=True):
            if engine is not None:
                curve.points.append(engine.solve(eps))
            else:
                curve.points.append(dynamical_rd(system, measure, N, eps, resolved, codebook))
        logger.debug(f"{system.label}: RD curve done for N={N} ({resolved})")
    return curve


def rdim_estimate(curve: RDCurve, headline: str = "max_n", truncation_error: float = 0.0) -> DimensionEstimate:
    """Slope of R(eps) against log2(1/eps) over the converged points, which must span a decade of eps"""
    rows = [{"epsilon": p.epsilon, "N": p.N, "value": p.R_bits} for p in curve.points if p.converged]
    if not rows:
        raise DomainError("no converged points to fit", module="ratedist", stage="rdim_estimate")
    return estimate_dimension(rows, "R", headline=headline, truncation_error=truncation_error,
                              metadata=curve.source, min_span_log2=config.RDIM_MIN_SPAN_LOG2)
