"""Dynamical Voronoi tilings of the line"""

from meandim.tiling.voronoi import EquivarianceReport, MarkerTrace, Tiling, check_equivariance, tile, trusted_range
from meandim.tiling.markers import BoundaryDensityReport, boundary_density, lemma_trace, periodic_trace

__all__ = [
    'MarkerTrace', 'Tiling', 'EquivarianceReport', 'tile', 'trusted_range', 'check_equivariance',
    'BoundaryDensityReport', 'boundary_density', 'lemma_trace', 'periodic_trace',
]
