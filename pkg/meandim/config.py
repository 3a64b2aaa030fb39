"""Configuration settings for the meandim laboratory"""

import math
import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


@dataclass
class LabConfig:
    # Budgets
    EXACT_POINT_BUDGET: int = field(default_factory=lambda: _env_int("MEANDIM_EXACT_POINTS", 20))
    ENUMERATION_BUDGET: int = field(default_factory=lambda: _env_int("MEANDIM_BUDGET_POINTS", 4096))
    ALL_SUBSETS_BUDGET: int = 15
    DENSE_RD_BUDGET: int = field(default_factory=lambda: _env_int("MEANDIM_DENSE_RD_POINTS", 1024))
    TRANSFER_BUDGET: int = 1 << 20

    # Tolerances
    DIAMETER_TOL: float = 1e-12
    LP_TOL: float = field(default_factory=lambda: _env_float("MEANDIM_LP_TOL", 1e-9))
    MASS_TOL: float = 1e-10
    EQUIVARIANCE_TOL: float = 1e-9

    # Blahut-Arimoto
    BA_GAP_TOL: float = 1e-8
    BA_MAX_ITER: int = field(default_factory=lambda: _env_int("MEANDIM_BA_MAX_ITER", 10_000))
    BA_BISECTION_STEPS: int = 60
    BA_SLOPE_CAP: float = 2.0 ** 24

    # Dimension profiles
    PROFILE_TOL: float = 1e-6
    PROFILE_S_MAX: float = 64.0

    # Slope fits
    SLOPE_MIN_POINTS: int = 3
    SLOPE_MIN_SPAN_LOG2: float = 1.0
    RDIM_MIN_SPAN_LOG2: float = math.log2(10.0)
    SLOPE_CONFIDENCE: float = 0.95

    # Execution
    DEFAULT_JOBS: int = field(default_factory=lambda: _env_int("MEANDIM_JOBS", os.cpu_count() or 1))

    # Logging
    LOG_LEVEL: str = field(default_factory=lambda: os.getenv("MEANDIM_LOG_LEVEL", "INFO"))
    LOG_FILE: str = field(default_factory=lambda: os.getenv("MEANDIM_LOG_FILE", ""))

    def budgets(self) -> dict:
        """Budget knobs recorded next to every emitted number"""
        return {
            "exact_point_budget": self.EXACT_POINT_BUDGET,
            "enumeration_budget": self.ENUMERATION_BUDGET,
            "all_subsets_budget": self.ALL_SUBSETS_BUDGET,
            "dense_rd_budget": self.DENSE_RD_BUDGET,
            "ba_max_iter": self.BA_MAX_ITER,
            "ba_gap_tol": self.BA_GAP_TOL,
            "lp_tol": self.LP_TOL,
            "profile_tol": self.PROFILE_TOL,
        }


# Global config instance
config = LabConfig()
