"""Push-forward averaging under the truncated shift and cylinder comparisons"""

from typing import Dict

import numpy as np

from meandim.systems.measures import MeasureOnSystem, aggregate
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, StructuralError

FILL_SYMBOL = 0


def shift_words(words: np.ndarray, j: int) -> np.ndarray:
    """T^j on truncated words: drop the first j symbols, fill the tail with FILL_SYMBOL"""
    if j == 0:
        return words
    shifted = np.full_like(words, FILL_SYMBOL)
    if j < words.shape[1]:
        shifted[:, :words.shape[1] - j] = words[:, j:]
    return shifted


def pushforward_average(system: SystemSpec, nu: MeasureOnSystem, n: int) -> MeasureOnSystem:
    """(1/n) sum_{j<n} T^j_* nu on the word representation of nu"""
    if nu.system is not system:
        raise StructuralError("measure belongs to another system", module="ergodic", stage="pushforward_average")
    length = system.word_length(nu.depth)
    if not 1 <= n <= length:
        raise DomainError(f"cannot average {n} shifts of words of length {length}", module="ergodic",
                          stage="pushforward_average")
    words, mass = nu.support()
    stacked = np.concatenate([shift_words(words, j) for j in range(n)])
    words_out, mass_out = aggregate(stacked, np.tile(mass, n) / n)
    metadata = dict(nu.metadata)
    metadata.update({"averaged_over": n, "boundary_fill": n - 1, "fill_symbol": FILL_SYMBOL,
                     "clean_depth": nu.depth - (n - 1)})
    return MeasureOnSystem(system, nu.depth, words_out, mass_out, provenance="averaged", metadata=metadata)


def shift_measure(mu: MeasureOnSystem) -> MeasureOnSystem:
    """T_* mu with one boundary fill"""
    words, mass = mu.support()
    words_out, mass_out = aggregate(shift_words(words, 1), mass)
    return MeasureOnSystem(mu.system, mu.depth, words_out, mass_out, provenance=mu.provenance,
                           metadata=dict(mu.metadata))


def central_positions(system: SystemSpec, m: int) -> range:
    """Word indices of the length-m cylinder centred on coordinate 0"""
    if not 1 <= m <= 2 * system.W + 1:
        raise DomainError(f"cylinder length {m} outside [1, 2W+1 = {2 * system.W + 1}]", module="ergodic",
                          stage="cylinder_distance")
    start = system.W - (m - 1) // 2
    return range(start, start + m)


def cylinder_marginals(mu: MeasureOnSystem, m: int) -> Dict:
    return mu.cylinder_masses(central_positions(mu.system, m))


def cylinder_distance(mu: MeasureOnSystem, nu: MeasureOnSystem, m: int) -> float:
    """Total variation between the laws of the central length-m cylinders"""
    if mu.system is not nu.system:
        raise StructuralError("measures live on different systems", module="ergodic", stage="cylinder_distance")
    a, b = cylinder_marginals(mu, m), cylinder_marginals(nu, m)
    return 0.5 * sum(abs(a.get(key, 0.0) - b.get(key, 0.0)) for key in set(a) | set(b))


def invariance_defect(system: SystemSpec, mu: MeasureOnSystem, m: int) -> float:
    """cylinder_distance(mu, T_* mu, m)"""
    if mu.system is not system:
        raise StructuralError("measure belongs to another system", module="ergodic", stage="invariance_defect")
    return cylinder_distance(mu, shift_measure(mu), m)
