"""Utility functions, logging and the error hierarchy for meandim"""

import logging
import math
from typing import Any, Optional

import numpy as np

from meandim.config import config


class MeandimError(Exception):
    """Base error; the message always names the module and the stage"""

    exit_code = 1

    def __init__(self, message: str, module: str = "meandim", stage: Optional[str] = None):
        self.message = message
        self.module = module
        self.stage = stage
        where = f"{module}:{stage}" if stage else module
        super().__init__(f"[{where}] {message}")


class StructuralError(MeandimError):
    """Malformed matrices, specs or configuration files"""

    exit_code = 2


class DomainError(MeandimError):
    """A precondition of an operation does not hold"""

    exit_code = 2


class CertificateRejected(DomainError):
    """A dual certificate failed its feasibility check"""

    def __init__(self, message: str, index: int, margin: float, module: str = "ratedist",
                 stage: Optional[str] = None):
        self.index = index
        self.margin = margin
        super().__init__(message, module=module, stage=stage)


class CapacityError(MeandimError):
    """A configured budget would be exceeded"""

    exit_code = 3


class NumericError(MeandimError):
    """Solver failure that cannot be reported in-band"""

    exit_code = 4


def setup_logging(log_level: str = "INFO", log_file: str = "") -> logging.Logger:
    """Setup logging configuration"""
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    return logging.getLogger("meandim")


def log2_ratio(numerator: float, denominator: float) -> float:
    """log2(numerator / denominator) for positive arguments"""
    return math.log2(numerator) - math.log2(denominator)


def coarse_power(diameters: np.ndarray, s: float, tau: float) -> np.ndarray:
    """(tau + diam)^s with the 0^0 = 1 convention"""
    base = np.asarray(diameters, dtype=float) + tau
    if s == 0:
        return np.ones_like(base)
    return np.power(base, s)


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers and scalars into plain JSON types"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


logger = setup_logging(config.LOG_LEVEL, config.LOG_FILE)
