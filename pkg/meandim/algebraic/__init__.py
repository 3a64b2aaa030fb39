"""Algebraic actions: projective dimension, Haar measures and rdim = prodim experiments"""

from meandim.algebraic.action import (
    AlgebraicActionSpec,
    ProdimResult,
    prodim,
    projection_dimension,
    subadditivity_check,
)
from meandim.algebraic.haar import haar_measure, translate
from meandim.algebraic.experiments import (
    RdimProdimReport,
    rdim_prodim_experiment,
    separating_bound_check,
    separating_threshold,
    torus_covering_lower_bound,
)
from meandim.systems.lattice import normal_form

__all__ = [
    'AlgebraicActionSpec', 'ProdimResult', 'prodim', 'projection_dimension', 'subadditivity_check',
    'haar_measure', 'translate', 'normal_form',
    'RdimProdimReport', 'rdim_prodim_experiment', 'separating_bound_check', 'separating_threshold',
    'torus_covering_lower_bound',
]
