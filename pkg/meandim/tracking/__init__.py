"""Tracking package for run manifests"""

from meandim.tracking.manifest import ExperimentLog, RunManifest, RunTracker, package_versions

__all__ = ['ExperimentLog', 'RunManifest', 'RunTracker', 'package_versions']
