"""Quantized alphabets and their point metrics"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from meandim.utils import StructuralError

KINDS = ("interval", "explicit", "torus")


@dataclass(frozen=True)
class AlphabetSpec:
    """A finite alphabet: quantized interval, explicit real values, or a quantized torus"""

    kind: str
    levels: int = 2
    values: Tuple[float, ...] = ()
    dimension: int = 1
    resolution: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StructuralError(f"unknown alphabet kind {self.kind!r}", module="systems", stage="alphabet")
        if self.kind == "interval" and self.levels < 1:
            raise StructuralError("interval alphabet needs levels >= 1", module="systems", stage="alphabet")
        if self.kind == "explicit":
            vals = tuple(float(v) for v in self.values)
            if not vals:
                raise StructuralError("explicit alphabet needs values", module="systems", stage="alphabet")
            if len(set(vals)) != len(vals):
                raise StructuralError("explicit alphabet values must be distinct", module="systems",
                                      stage="alphabet")
            if min(vals) < 0 or max(vals) > 1:
                raise StructuralError("explicit alphabet values must lie in [0, 1]", module="systems",
                                      stage="alphabet")
            object.__setattr__(self, "values", vals)
        if self.kind == "torus" and (self.dimension < 1 or self.resolution < 1):
            raise StructuralError("torus alphabet needs r, q >= 1", module="systems", stage="alphabet")

    @classmethod
    def interval(cls, levels: int) -> "AlphabetSpec":
        return cls(kind="interval", levels=levels)

    @classmethod
    def explicit(cls, values) -> "AlphabetSpec":
        return cls(kind="explicit", values=tuple(values))

    @classmethod
    def torus(cls, dimension: int, resolution: int) -> "AlphabetSpec":
        return cls(kind="torus", dimension=dimension, resolution=resolution)

    @property
    def size(self) -> int:
        if self.kind == "interval":
            return self.levels
        if self.kind == "explicit":
            return len(self.values)
        return self.resolution ** self.dimension

    def real_values(self) -> np.ndarray:
        """Symbol values on [0, 1] for interval and explicit alphabets"""
        if self.kind == "interval":
            if self.levels == 1:
                return np.zeros(1)
            return np.arange(self.levels) / (self.levels - 1)
        if self.kind == "explicit":
            return np.asarray(self.values, dtype=float)
        raise StructuralError("torus alphabets have no real values", module="systems", stage="alphabet")

    def torus_coordinates(self) -> np.ndarray:
        """Integer coordinates in Z_q^r, symbol index = sum_i c_i q^i"""
        q, r = self.resolution, self.dimension
        index = np.arange(q ** r)
        return np.stack([(index // q ** i) % q for i in range(r)], axis=1)

    def symbol_index(self, coordinates) -> int:
        q = self.resolution
        return int(sum(int(c) % q * q ** i for i, c in enumerate(coordinates)))

    def labels(self) -> List[str]:
        if self.kind == "torus":
            return ["(" + ",".join(str(c) for c in row) + ")" for row in self.torus_coordinates()]
        return [f"{v:.6g}" for v in self.real_values()]

    def distance_matrix(self, values: Optional[np.ndarray] = None) -> np.ndarray:
        """Point metric: absolute value on reals, sup of circle distances on tori"""
        if self.kind == "torus":
            q = self.resolution
            coords = self.torus_coordinates()
            gap = np.abs(coords[:, None, :] - coords[None, :, :])
            circle = np.minimum(gap, q - gap) / q
            return circle.max(axis=2)
        v = self.real_values() if values is None else np.asarray(values, dtype=float)
        return np.abs(v[:, None] - v[None, :])

    @property
    def diameter(self) -> float:
        return float(self.distance_matrix().max())

    def to_dict(self) -> Dict:
        if self.kind == "interval":
            return {"kind": "interval", "levels": self.levels}
        if self.kind == "explicit":
            return {"kind": "explicit", "values": list(self.values)}
        return {"kind": "torus", "r": self.dimension, "q": self.resolution}
