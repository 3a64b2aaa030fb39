"""Dimension estimates from (eps, N) samples"""

from meandim.estimation.slope import DimensionEstimate, SlopeFit, estimate_dimension, fit_slope
from meandim.estimation.profiles import covering_profile, covering_sample, metric_mean_dimension_estimate

__all__ = [
    'SlopeFit', 'DimensionEstimate', 'fit_slope', 'estimate_dimension',
    'covering_profile', 'covering_sample', 'metric_mean_dimension_estimate',
]
