"""Execution package: config models, experiment runner, output and example suites"""

from meandim.execution.models import ExperimentConfig, ExperimentModel, config_schema, load_config, parse_config
from meandim.execution.runner import ExperimentResult, ExperimentRunner
from meandim.execution.output import OutputFormatter
from meandim.execution.suite import SUITES, suite_experiments, suite_names

__all__ = [
    'ExperimentConfig', 'ExperimentModel', 'config_schema', 'load_config', 'parse_config',
    'ExperimentResult', 'ExperimentRunner', 'OutputFormatter',
    'SUITES', 'suite_experiments', 'suite_names',
]
