"""Invariant-measure constructions: averaging, couplings and the nice-measure pipeline"""

from meandim.ergodic.averaging import (
    cylinder_distance,
    invariance_defect,
    pushforward_average,
    shift_measure,
    shift_words,
)
from meandim.ergodic.coupling import Coupling, optimal_coupling
from meandim.ergodic.pipeline import NiceMeasurePipeline, PipelineReport, nice_measure_pipeline

__all__ = [
    'pushforward_average', 'shift_measure', 'shift_words', 'cylinder_distance', 'invariance_defect',
    'Coupling', 'optimal_coupling',
    'NiceMeasurePipeline', 'PipelineReport', 'nice_measure_pipeline',
]
