"""Mean Hausdorff dimension profiles dim_H(X, d_N, eps) / N over (eps, N) grids"""

from dataclasses import dataclass, field
from typing import Dict, Sequence

import pandas as pd

from meandim.hausdorff.content import dim_profile
from meandim.systems.orbit import orbit_metric
from meandim.systems.shift import SystemSpec
from meandim.utils import DomainError, logger


@dataclass
class MeanHausdorffEstimate:
    """Per-eps plateau of dim_H(X, d_N, eps) / N and its trend as eps decreases"""

    kind: str
    tau: float
    samples: pd.DataFrame
    truncation_error: float
    metadata: Dict = field(default_factory=dict)

    @property
    def plateau(self) -> pd.Series:
        """Value at the largest N for every eps, indexed by decreasing eps"""
        top = self.samples[self.samples["N"] == self.samples["N"].max()]
        return top.set_index("epsilon")["value"].sort_index(ascending=False)

    @property
    def upper(self) -> pd.Series:
        """max over N per eps, the finite stand-in for the limsup"""
        return self.samples.groupby("epsilon")["value"].max().sort_index(ascending=False)

    @property
    def monotone(self) -> bool:
        values = self.plateau.to_numpy()
        return bool((values[1:] >= values[:-1] - 1e-9).all())

    @property
    def value(self) -> float:
        """Plateau at the finest eps"""
        return float(self.plateau.iloc[-1])

    def to_frame(self) -> pd.DataFrame:
        return self.samples.copy()

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "tau": self.tau, "value": self.value, "monotone": self.monotone,
                "plateau": {str(k): v for k, v in self.plateau.items()},
                "truncation_error": self.truncation_error,
                "samples": self.samples.to_dict(orient="records"), "metadata": self.metadata}


def mean_hausdorff_estimate(system: SystemSpec, eps_grid: Sequence[float], n_list: Sequence[int],
                            tau: float = 0.0, kind: str = "max", mode: str = "auto") -> MeanHausdorffEstimate:
    """dim_H(c X, c eps, tau) / N for every orbit space X = (X, d_N), with c = min(1, (1 - tau) / diam X).

    Only the metric and eps are rescaled; tau keeps its value. A row with c < 1 is the profile
    of the rescaled space, not dim_H(X, d_N, eps): the content gains a factor c^s and the offset
    is tau / c in the original units. Each row records scale, scaled_epsilon and tau.
    """
    if not eps_grid or not n_list:
        raise DomainError("eps grid and N list must be nonempty", module="hausdorff", stage="mean_hausdorff")
    if not 0 <= tau < 1:
        raise DomainError(f"tau must lie in [0, 1), got {tau}", module="hausdorff", stage="mean_hausdorff")
    rows = []
    for N in sorted(set(n_list)):
        space = orbit_metric(system, N, kind)
        scale = 1.0
        if tau + space.diameter > 1:
            scale = (1 - tau) / space.diameter
            space = space.scaled(scale)
        for eps in sorted(set(eps_grid), reverse=True):
            profile = dim_profile(space, eps * scale, tau, mode)
            rows.append({"epsilon": eps, "N": N, "metric": kind, "scale": scale, "scaled_epsilon": eps * scale,
                         "tau": tau, "dim": profile.value,
                         "value": profile.value / N, "mode": profile.mode})
        logger.debug(f"{system.label}: mean Hausdorff profile done for N={N} (scale {scale:.4g})")
    return MeanHausdorffEstimate(kind=kind, tau=tau, samples=pd.DataFrame(rows),
                                 truncation_error=system.truncation_error(),
                                 metadata={"system": system.label})
