"""Lower bounds on the rate: convex duality and the scaling-law (GMT) bound"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from meandim.ratedist.information import DiscreteDistribution
from meandim.utils import CertificateRejected, DomainError, StructuralError

LN2 = math.log(2.0)
LOG2_E = 1.0 / LN2
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class DualityBound:
    value: float
    a: float
    epsilon: float
    worst_margin: float
    witness: int

    def to_dict(self) -> Dict:
        return {"value": self.value, "a": self.a, "epsilon": self.epsilon,
                "worst_margin": self.worst_margin, "witness": self.witness}


def duality_lower_bound(source, distortion, lam=None, a: float = 0.0, eps: float = 0.0,
                        log2_lam=None) -> DualityBound:
    """-a eps + sum mu log2 lambda, after checking sum_x lambda(x) 2^(-a d(x, y)) mu(x) <= 1 for every y"""
    mu = source.mass if isinstance(source, DiscreteDistribution) else np.asarray(source, dtype=float)
    D = np.asarray(distortion, dtype=float)
    if D.ndim != 2 or D.shape[0] != len(mu):
        raise StructuralError("distortion rows must match the source", module="ratedist", stage="duality_bound")
    if a < 0:
        raise DomainError("a must be nonnegative", module="ratedist", stage="duality_bound")
    if log2_lam is None:
        if lam is None:
            raise StructuralError("give lam or log2_lam", module="ratedist", stage="duality_bound")
        lam = np.asarray(lam, dtype=float)
        if (lam <= 0).any():
            raise DomainError("lambda must be positive", module="ratedist", stage="duality_bound")
        log2_lam = np.log2(lam)
    log2_lam = np.broadcast_to(np.asarray(log2_lam, dtype=float), mu.shape)

    live = mu > 0
    # log2 of sum_x lambda(x) 2^(-a d(x, y)) mu(x), one entry per y
    exponent = (log2_lam[live] + np.log2(mu[live]))[:, None] - a * D[live]
    log2_load = logsumexp(exponent * LN2, axis=0) / LN2
    worst = int(np.argmax(log2_load))
    load = float(np.exp2(log2_load[worst]))
    if load > 1 + FEASIBILITY_TOL:
        raise CertificateRejected(f"dual constraint violated at reproduction {worst}: load {load:.12g} > 1",
                                  index=worst, margin=load - 1, stage="duality_bound")
    value = float(-a * eps + (mu[live] * log2_lam[live]).sum())
    return DualityBound(value=value, a=a, epsilon=eps, worst_margin=1 - load, witness=worst)


def _log2_gmt_constant(s: float) -> float:
    """log2 {2 + (3 log2 e)^s s^-s Gamma(s + 1)}, with s^-s = 1 at s = 0"""
    ln_term = s * math.log(3 * LOG2_E) + gammaln(s + 1)
    if s > 0:
        ln_term -= s * math.log(s)
    return float(np.logaddexp(math.log(2.0), ln_term) / LN2)


def _constant_ratio(s: float) -> float:
    return (s + _log2_gmt_constant(s)) / (1 + s)


@lru_cache(maxsize=1)
def stirling_constant() -> float:
    """Smallest C with s + log2 {2 + (3 log2 e)^s s^-s Gamma(s + 1)} <= C (1 + s) for every s >= 0

    Past its single peak the ratio decreases towards 1 + log2(3 log2 e / e) (Stirling), so the
    search stops at s = 64.
    """
    result = minimize_scalar(lambda s: -_constant_ratio(s), bounds=(0.0, 64.0), method="bounded",
                             options={"xatol": 1e-10})
    return max(-float(result.fun), _constant_ratio(0.0))


@dataclass(frozen=True)
class GMTBound:
    s: float
    epsilon: float
    delta: float
    tau: float
    value: float
    C_at_s: float
    C: float

    @property
    def rate_floor(self) -> float:
        return max(0.0, self.value)

    @property
    def uniform_value(self) -> float:
        """s log2(1/eps) - C (s + 1) with the s-independent constant, never above value"""
        return self.s * math.log2(1 / self.epsilon) - self.C * (self.s + 1)

    @property
    def a(self) -> float:
        """Slope of the duality certificate, s / eps"""
        return self.s / self.epsilon

    @property
    def log2_lam(self) -> float:
        """The constant certificate lambda = eps^-s {2 + ...}^-1, in log2"""
        return self.s * math.log2(1 / self.epsilon) - _log2_gmt_constant(self.s)

    def to_dict(self) -> Dict:
        return {"s": self.s, "epsilon": self.epsilon, "delta": self.delta, "tau": self.tau,
                "value": self.value, "C_at_s": self.C_at_s, "C": self.C, "uniform_value": self.uniform_value,
                "rate_floor": self.rate_floor, "a": self.a, "log2_lambda": self.log2_lam}


def gmt_preconditions(s: float, eps: float, delta: float, tau: float) -> Optional[str]:
    """The first failing precondition, or None"""
    if s < 0:
        return f"s = {s} < 0"
    if not 0 < eps < 1:
        return f"eps = {eps} outside (0, 1)"
    if 2 * eps * math.log2(1 / eps) > delta:
        return f"2 eps log2(1/eps) = {2 * eps * math.log2(1 / eps):.6g} > delta = {delta}"
    if not 0 <= tau <= min(eps / 3, delta / 2):
        return f"tau = {tau} outside [0, min(eps/3, delta/2) = {min(eps / 3, delta / 2):.6g}]"
    return None


def gmt_lower_bound(s: float, eps: float, delta: float, tau: float = 0.0) -> GMTBound:
    """s log2(1/eps) - s - log2 {2 + (3 log2 e)^s s^-s Gamma(s + 1)}

    C_at_s rewrites the constant term as C_at_s (s + 1); C is the s-independent constant that
    bounds every C_at_s.
    """
    failure = gmt_preconditions(s, eps, delta, tau)
    if failure:
        raise DomainError(f"precondition fails: {failure}", module="ratedist", stage="gmt_lower_bound")
    constant = _log2_gmt_constant(s)
    value = s * math.log2(1 / eps) - s - constant
    return GMTBound(s=s, epsilon=eps, delta=delta, tau=tau, value=value,
                    C_at_s=(s + constant) / (1 + s), C=stirling_constant())
