"""Orbit metrics d_N (max over the orbit) and d̄_N (orbit average)"""

from typing import Optional

import numpy as np

from meandim.metric.space import FiniteMetricSpace
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, StructuralError

KINDS = ("max", "avg")


def _check(system: SystemSpec, N: int, kind: str, words: Optional[np.ndarray] = None):
    if kind not in KINDS:
        raise StructuralError(f"unknown orbit metric kind {kind!r}", module="metric_core", stage="orbit_metric")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}", module="metric_core", stage="orbit_metric")
    if words is not None and words.shape[1] < system.word_length(N):
        raise DomainError(
            f"words of length {words.shape[1]} cannot carry {N} shifts (need {system.word_length(N)})",
            module="metric_core", stage="orbit_metric")


def orbit_distances(system: SystemSpec, rows: np.ndarray, cols: np.ndarray, N: int,
                    kind: str = "max") -> np.ndarray:
    """d_N or d̄_N between every row word and every column word"""
    _check(system, N, kind, rows)
    _check(system, N, kind, cols)
    out = None
    for n in range(N):
        term = system.window_distance(rows, cols, n)
        if out is None:
            out = term
        elif kind == "max":
            np.maximum(out, term, out=out)
        else:
            out += term
    return out if kind == "max" else out / N


def distances_from(system: SystemSpec, word: np.ndarray, words: np.ndarray, N: int,
                   kind: str = "max") -> np.ndarray:
    """One row of the orbit metric, for large word sets"""
    _check(system, N, kind, words)
    terms = np.stack([system.window_distance_from(word, words, n) for n in range(N)])
    return terms.max(axis=0) if kind == "max" else terms.mean(axis=0)


def orbit_metric(system: SystemSpec, N: int, kind: str = "max") -> FiniteMetricSpace:
    """The orbit metric over the system's depth-N words"""
    _check(system, N, kind)
    words = system.words(N)
    dist = orbit_distances(system, words, words, N, kind)
    np.fill_diagonal(dist, 0.0)
    label = f"{system.label or 'system'}/d{'' if kind == 'max' else '-bar'}_{N}"
    return FiniteMetricSpace(system.point_ids(words), dist, label)
