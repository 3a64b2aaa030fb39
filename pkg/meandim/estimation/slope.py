"""Log-log slope fits and the DimensionEstimate report"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from meandim.config import config
from meandim.utils import DomainError, logger

HEADLINES = ("max_n", "envelope", "increment")


@dataclass(frozen=True)
class SlopeFit:
    """Weighted least-squares line value ~ slope * log2(1/eps) + intercept"""

    slope: float
    intercept: float
    n_points: int
    residual_rms: float
    r_squared: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> Dict:
        return {"slope": self.slope, "intercept": self.intercept, "n_points": self.n_points,
                "residual_rms": self.residual_rms, "r_squared": self.r_squared,
                "ci": [self.ci_low, self.ci_high]}


def fit_slope(epsilons: Sequence[float], values: Sequence[float],
              confidence: Optional[float] = None) -> SlopeFit:
    """Fit against log2(1/eps) with weights log2(1/eps); points with eps >= 1 are dropped"""
    confidence = config.SLOPE_CONFIDENCE if confidence is None else confidence
    eps = np.asarray(epsilons, dtype=float)
    y = np.asarray(values, dtype=float)
    x = -np.log2(eps)
    keep = (x > 0) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) < 2 or np.ptp(x) == 0:
        raise DomainError(f"need at least two distinct eps < 1 to fit a slope, got {len(x)}",
                          module="estimation", stage="fit_slope")

    w = x / x.sum()
    sw = np.sqrt(w)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])

    residuals = y - (slope * x + intercept)
    rss = float((w * residuals ** 2).sum())
    y_bar = float((w * y).sum())
    tss = float((w * (y - y_bar) ** 2).sum())
    r_squared = 1.0 if tss <= 1e-300 else 1.0 - rss / tss

    dof = len(x) - 2
    if dof > 0:
        sigma2 = rss / dof
        cov = sigma2 * np.linalg.inv((A * w[:, None]).T @ A)
        half = float(stats.t.ppf(0.5 + confidence / 2, dof) * np.sqrt(max(cov[0, 0], 0.0)))
    else:
        half = 0.0

    return SlopeFit(slope=slope, intercept=intercept, n_points=len(x),
                    residual_rms=float(np.sqrt(np.mean(residuals ** 2))), r_squared=r_squared,
                    ci_low=slope - half, ci_high=slope + half)


@dataclass
class DimensionEstimate:
    """Samples (eps, N, value) with per-N, envelope and increment slope fits"""

    quantity: str
    samples: pd.DataFrame
    max_n: SlopeFit
    per_n: Dict[int, SlopeFit] = field(default_factory=dict)
    envelope: Optional[SlopeFit] = None
    increment: Optional[SlopeFit] = None
    headline: str = "max_n"
    truncation_error: float = 0.0
    metadata: Dict = field(default_factory=dict)

    @property
    def fit(self) -> SlopeFit:
        chosen = getattr(self, self.headline)
        return chosen if chosen is not None else self.max_n

    @property
    def slope(self) -> float:
        return self.fit.slope

    def to_frame(self) -> pd.DataFrame:
        return self.samples.copy()

    def to_dict(self) -> Dict:
        return {
            "quantity": self.quantity,
            "slope": self.slope,
            "headline": self.headline,
            "max_n": self.max_n.to_dict(),
            "per_n": {str(n): f.to_dict() for n, f in sorted(self.per_n.items())},
            "envelope": self.envelope.to_dict() if self.envelope else None,
            "increment": self.increment.to_dict() if self.increment else None,
            "truncation_error": self.truncation_error,
            "samples": self.samples.to_dict(orient="records"),
            "metadata": self.metadata,
        }


def _check_span(frame: pd.DataFrame, min_points: int, min_span_log2: float, stage: str):
    eps = np.unique(frame.loc[frame["epsilon"] < 1, "epsilon"].to_numpy())
    if len(eps) < min_points:
        raise DomainError(f"need {min_points} usable eps values below 1, got {len(eps)}",
                          module="estimation", stage=stage)
    span = float(np.log2(eps.max() / eps.min()))
    # a grid at exactly the required span passes
    if span < min_span_log2 - 1e-9:
        raise DomainError(f"eps grid spans {span:.3f} octaves ({span / np.log2(10):.2f} decades), "
                          f"need {min_span_log2:.3f} octaves", module="estimation", stage=stage)


def estimate_dimension(rows: List[Dict], quantity: str, headline: str = "max_n",
                       truncation_error: float = 0.0, min_points: Optional[int] = None,
                       metadata: Optional[Dict] = None, min_span_log2: Optional[float] = None) -> DimensionEstimate:
    """Slope report from rows carrying at least epsilon, N and value.

    The largest-N rows need min_points scales below 1 spanning min_span_log2
    octaves (default SLOPE_MIN_SPAN_LOG2).
    """
    if headline not in HEADLINES:
        raise DomainError(f"unknown headline {headline!r}", module="estimation", stage="estimate")
    min_points = config.SLOPE_MIN_POINTS if min_points is None else min_points
    min_span_log2 = config.SLOPE_MIN_SPAN_LOG2 if min_span_log2 is None else min_span_log2
    frame = pd.DataFrame(rows)
    if frame.empty:
        raise DomainError("no samples to fit", module="estimation", stage="estimate")
    frame = frame.sort_values(["N", "epsilon"], ascending=[True, False], kind="mergesort").reset_index(drop=True)

    ns = sorted(int(n) for n in frame["N"].unique())
    top = frame[frame["N"] == ns[-1]]
    _check_span(top, min_points, min_span_log2, "estimate")

    per_n: Dict[int, SlopeFit] = {}
    for n in ns:
        sub = frame[frame["N"] == n]
        if sub.loc[sub["epsilon"] < 1, "epsilon"].nunique() >= 2:
            per_n[n] = fit_slope(sub["epsilon"], sub["value"])

    envelope_rows = frame.groupby("epsilon", sort=True)["value"].min()
    envelope = fit_slope(envelope_rows.index.to_numpy(), envelope_rows.to_numpy())

    increment = None
    if len(ns) >= 2:
        n1, n2 = ns[-2], ns[-1]
        lo = frame[frame["N"] == n1].set_index("epsilon")["value"]
        hi = frame[frame["N"] == n2].set_index("epsilon")["value"]
        common = lo.index.intersection(hi.index)
        if len(common[common < 1]) >= 2:
            steps = (n2 * hi[common] - n1 * lo[common]) / (n2 - n1)
            increment = fit_slope(common.to_numpy(), steps.to_numpy())

    estimate = DimensionEstimate(quantity=quantity, samples=frame, max_n=per_n[ns[-1]], per_n=per_n,
                                 envelope=envelope, increment=increment, headline=headline,
                                 truncation_error=truncation_error, metadata=dict(metadata or {}))
    logger.debug(f"{quantity} slope ({estimate.headline}) = {estimate.slope:.4f} over {len(frame)} samples")
    return estimate
