"""Coarse Hausdorff contents, weighted contents and Frostman measures"""

from meandim.hausdorff.content import ContentResult, DimensionProfile, dim_profile, hausdorff_content
from meandim.hausdorff.weighted import WeightedCover, candidate_blocks, solve_content_lp, weighted_content
from meandim.hausdorff.frostman import (
    FrostmanCertificate,
    ScalingLawReport,
    frostman_measure,
    frostman_threshold,
    lemma_inequality_check,
    quantitative_frostman,
    verify_scaling_law,
)
from meandim.hausdorff.mean import MeanHausdorffEstimate, mean_hausdorff_estimate

__all__ = [
    'ContentResult', 'DimensionProfile', 'hausdorff_content', 'dim_profile',
    'WeightedCover', 'candidate_blocks', 'solve_content_lp', 'weighted_content',
    'FrostmanCertificate', 'ScalingLawReport', 'frostman_measure', 'verify_scaling_law',
    'lemma_inequality_check', 'frostman_threshold', 'quantitative_frostman',
    'MeanHausdorffEstimate', 'mean_hausdorff_estimate',
]
