"""Mutual information, Blahut-Arimoto and rate-distortion bounds"""

from meandim.ratedist.information import (
    DiscreteDistribution,
    JointDistribution,
    entropy,
    kl_divergence,
    mutual_information,
    mutual_information_of,
)
from meandim.ratedist.blahut import BlahutArimotoSolver, RDSolution, blahut_arimoto
from meandim.ratedist.bounds import DualityBound, GMTBound, duality_lower_bound, gmt_lower_bound
from meandim.ratedist.dynamical import RDCurve, RDPoint, dynamical_rd, rd_curve, rdim_estimate

__all__ = [
    'DiscreteDistribution', 'JointDistribution', 'entropy', 'kl_divergence',
    'mutual_information', 'mutual_information_of',
    'BlahutArimotoSolver', 'RDSolution', 'blahut_arimoto',
    'DualityBound', 'GMTBound', 'duality_lower_bound', 'gmt_lower_bound',
    'RDCurve', 'RDPoint', 'dynamical_rd', 'rd_curve', 'rdim_estimate',
]
