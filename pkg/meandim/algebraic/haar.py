"""Quantized Haar measures on algebraic actions"""

from typing import Union

import numpy as np

from meandim.algebraic.action import AlgebraicActionSpec
from meandim.systems.measures import MeasureOnSystem
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, logger


def haar_measure(source: Union[AlgebraicActionSpec, SystemSpec], depth: int = 1) -> MeasureOnSystem:
    """Uniform measure on the solution subgroup of Z_q^(r (2W + depth)); words stay lazy"""
    system = source.to_system() if isinstance(source, AlgebraicActionSpec) else source
    if system.alphabet.kind != "torus":
        raise DomainError("Haar measures live on torus alphabets", module="algebraic", stage="haar_measure")
    metadata = {"q": system.alphabet.resolution, "r": system.alphabet.dimension}
    if system.constraint is not None:
        group = system.solution_group(depth)
        group.require_compatible()
        free = group.n - group.rank
        metadata.update({"order": group.order, "rank": group.rank, "torsion": group.torsion,
                         "expected_order": system.alphabet.resolution ** free * group.torsion,
                         "elementary_divisors": [d for d in group.diagonal if d != 0]})
    else:
        metadata["order"] = system.symbol_count ** system.word_length(depth)
    logger.debug(f"Haar measure on {system.label} at depth {depth}: order {metadata['order']}")
    return MeasureOnSystem(system, depth, provenance="haar", metadata=metadata)


def translate(words: np.ndarray, element: np.ndarray, system: SystemSpec) -> np.ndarray:
    """Coordinate-wise group addition of a word to every word"""
    alphabet = system.alphabet
    coords = alphabet.torus_coordinates()
    q = alphabet.resolution
    summed = (coords[words] + coords[np.asarray(element)][None, :, :]) % q
    return (summed * (q ** np.arange(alphabet.dimension))).sum(axis=2)
