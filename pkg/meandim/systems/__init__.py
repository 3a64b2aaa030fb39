"""Quantized, window-truncated shift systems"""

from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.shift import (
    ConstraintSpec,
    EnumerationPolicy,
    SystemSpec,
    build_full_shift,
    build_sequence_example,
    truncation_error,
)
from meandim.systems.orbit import distances_from, orbit_distances, orbit_metric
from meandim.systems.product_cover import ProductCover, product_covering_number
from meandim.systems.measures import (
    MeasureOnSystem,
    delta_measure,
    product_measure,
    uniform_measure,
)

__all__ = [
    'AlphabetSpec', 'ConstraintSpec', 'EnumerationPolicy', 'SystemSpec',
    'build_full_shift', 'build_sequence_example', 'truncation_error',
    'orbit_metric', 'orbit_distances', 'distances_from',
    'ProductCover', 'product_covering_number',
    'MeasureOnSystem', 'product_measure', 'delta_measure', 'uniform_measure',
]
