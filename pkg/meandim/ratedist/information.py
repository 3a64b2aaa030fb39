"""Discrete distributions, entropy and mutual information (base-2 logs)"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from meandim.config import config
from meandim.utils import DomainError, StructuralError


def _check_mass(mass: np.ndarray, stage: str) -> np.ndarray:
    mass = np.asarray(mass, dtype=float)
    if (mass < 0).any():
        raise DomainError("negative probability mass", module="ratedist", stage=stage)
    if abs(mass.sum() - 1.0) > config.MASS_TOL:
        raise DomainError(f"mass sums to {mass.sum():.15g}, expected 1", module="ratedist", stage=stage)
    return mass


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    support: Tuple[str, ...]
    mass: np.ndarray

    def __post_init__(self):
        mass = _check_mass(self.mass, "distribution")
        if mass.ndim != 1 or len(mass) != len(self.support):
            raise StructuralError("support and mass disagree in length", module="ratedist", stage="distribution")
        object.__setattr__(self, "support", tuple(str(s) for s in self.support))
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_weights(cls, weights: Sequence[float], support: Optional[Sequence[str]] = None) -> "DiscreteDistribution":
        w = np.asarray(weights, dtype=float)
        labels = support if support is not None else [str(i) for i in range(len(w))]
        return cls(tuple(labels), w / w.sum())

    @classmethod
    def uniform(cls, n: int) -> "DiscreteDistribution":
        return cls.from_weights(np.ones(n))

    def __len__(self) -> int:
        return len(self.mass)

    def to_dict(self) -> Dict:
        return {"support": list(self.support), "mass": self.mass.tolist()}


@dataclass(frozen=True, eq=False)
class JointDistribution:
    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 2 or mass.shape != (len(self.rows), len(self.cols)):
            raise StructuralError(f"joint mass has shape {mass.shape}, expected "
                                  f"({len(self.rows)}, {len(self.cols)})", module="ratedist", stage="joint")
        object.__setattr__(self, "mass", _check_mass(mass, "joint"))

    @classmethod
    def from_matrix(cls, mass) -> "JointDistribution":
        mass = np.asarray(mass, dtype=float)
        return cls(tuple(str(i) for i in range(mass.shape[0])), tuple(str(j) for j in range(mass.shape[1])), mass)

    @classmethod
    def from_channel(cls, source: DiscreteDistribution, channel: np.ndarray,
                     cols: Optional[Sequence[str]] = None) -> "JointDistribution":
        channel = np.asarray(channel, dtype=float)
        labels = tuple(cols) if cols is not None else tuple(str(j) for j in range(channel.shape[1]))
        return cls(source.support, labels, source.mass[:, None] * channel)

    @property
    def row_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def conditional(self) -> np.ndarray:
        """nu(y|x); rows with zero mass are left at zero"""
        px = self.row_marginal
        out = np.zeros_like(self.mass)
        live = px > 0
        out[live] = self.mass[live] / px[live, None]
        return out

    def to_dict(self) -> Dict:
        return {"rows": list(self.rows), "cols": list(self.cols), "mass": self.mass.tolist()}


def entropy(p) -> float:
    """Shannon entropy in bits, 0 log 0 = 0"""
    mass = p.mass if isinstance(p, DiscreteDistribution) else np.asarray(p, dtype=float)
    nz = mass[mass > 0]
    return float(-(nz * np.log2(nz)).sum())


def kl_divergence(p, q) -> float:
    """D(p || q) in bits; infinite when p charges a zero of q"""
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    live = p > 0
    if (q[live] <= 0).any():
        return float("inf")
    return float((p[live] * (np.log2(p[live]) - np.log2(q[live]))).sum())


def _mutual_information(mass: np.ndarray) -> float:
    px = mass.sum(axis=1)
    py = mass.sum(axis=0)
    i, j = np.nonzero(mass > 0)
    p = mass[i, j]
    value = float((p * (np.log2(p) - np.log2(px[i]) - np.log2(py[j]))).sum())
    return max(value, 0.0)


def mutual_information(joint: JointDistribution) -> float:
    """I(X;Y) = sum p(x,y) log2 p(x,y) / (p(x) p(y)) over the nonzero cells"""
    return _mutual_information(joint.mass)


def mutual_information_of(source, channel) -> float:
    """I(mu, nu) as a function of a source law and a channel matrix"""
    mu = source.mass if isinstance(source, DiscreteDistribution) else np.asarray(source, dtype=float)
    channel = np.asarray(channel, dtype=float)
    return _mutual_information(mu[:, None] * channel)
