"""Pre-registered acceptance configurations for the worked examples"""

from typing import Dict, List

from meandim.execution.models import ExperimentModel
from meandim.utils import StructuralError

HILBERT_EPS = [1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32]
HARMONIC_EPS = [2.0 ** -e for e in range(4, 11)]
GEOMETRIC_EPS = [2.0 ** -e for e in range(12, 33, 4)]

# Alphabets are fine enough that the counts do not saturate on the grid; the
# increment headline removes the 2W window coordinates every depth carries.
SUITES: Dict[str, List[Dict]] = {
    "hilbert": [
        {
            "name": "hilbert-covering",
            "kind": "covering-profile",
            "system": {"kind": "full-shift", "alphabet": {"kind": "interval", "levels": 256}, "W": 3},
            "grids": {"epsilons": HILBERT_EPS, "N": [4, 5]},
            "mode": "product",
            "headline": "increment",
            "expect": {"target": 1.0, "low": 0.8, "high": 1.2},
        },
        {
            "name": "hilbert-rd",
            "kind": "rd-curve",
            "system": {"kind": "full-shift", "alphabet": {"kind": "interval", "levels": 64}, "W": 1},
            "grids": {"epsilons": [1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32], "N": [2, 3]},
            "measure": {"kind": "product"},
            "method": "separable",
            "headline": "increment",
            "expect": {"target": 1.0, "low": 0.8, "high": 1.2},
        },
    ],
    "harmonic": [
        {
            "name": "harmonic-covering",
            "kind": "covering-profile",
            "system": {"kind": "sequence", "k": 128, "variant": "harmonic", "W": 3},
            "grids": {"epsilons": HARMONIC_EPS, "N": [4, 5]},
            "mode": "product",
            "headline": "increment",
            "expect": {"target": 0.5, "low": 0.35, "high": 0.65},
        },
    ],
    "geometric": [
        {
            "name": "geometric-covering",
            "kind": "covering-profile",
            "system": {"kind": "sequence", "k": 64, "variant": "geometric", "W": 3},
            "grids": {"epsilons": GEOMETRIC_EPS, "N": [4, 5]},
            "mode": "product",
            "headline": "increment",
            "expect": {"target": 0.0, "high": 0.1},
        },
    ],
    "algebraic-linked": [
        {
            "name": "algebraic-linked",
            "kind": "algebraic",
            "system": {"kind": "algebraic", "W": 0,
                       "action": {"r": 2, "a": 2, "M": [[0, 1, -1, 0]], "q": 16}},
            "grids": {"epsilons": [0.4, 0.2, 0.1, 1 / 16, 0.04], "N": [1, 2, 3],
                      "proxy_epsilons": [1 / 4, 3 / 16, 1 / 8]},
            "mode": "greedy",
            "headline": "increment",
            "expect": {"target": 1.0, "low": 0.7, "high": 1.3},
        },
    ],
}


def suite_names() -> List[str]:
    return sorted(SUITES)


def suite_experiments(name: str) -> List[ExperimentModel]:
    """The registered experiments of a suite, validated like any config file"""
    if name not in SUITES:
        raise StructuralError(f"unknown example suite {name!r}; known: {suite_names()}", module="cli",
                              stage="example_suite")
    return [ExperimentModel.model_validate(entry) for entry in SUITES[name]]
