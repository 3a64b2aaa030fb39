"""Finite metric spaces, covering and separating numbers, orbit metrics"""

from meandim.metric.space import Cover, FiniteMetricSpace, MetricViolation, validate_metric
from meandim.metric.covering import (
    CoverResult,
    SeparationResult,
    covering_number,
    sandwich_check,
    separating_number,
    tame_growth_profile,
    tame_transform,
)

__all__ = [
    'FiniteMetricSpace', 'Cover', 'MetricViolation', 'validate_metric',
    'CoverResult', 'SeparationResult', 'covering_number', 'separating_number',
    'tame_transform', 'tame_growth_profile', 'sandwich_check', 'orbit_metric',
]


def __getattr__(name):
    # orbit metrics need SystemSpec, which itself builds on this package
    if name == "orbit_metric":
        from meandim.systems.orbit import orbit_metric
        return orbit_metric
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
