"""Experiment configuration models (JSON files validated with pydantic)"""

import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from meandim.algebraic.action import AlgebraicActionSpec
from meandim.config import LabConfig
from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.shift import EnumerationPolicy, SystemSpec, build_sequence_example
from meandim.utils import StructuralError

ExperimentKind = Literal["covering-profile", "dim-profile", "rd-curve", "frostman", "nice-measure",
                         "tiling", "algebraic", "example-suite"]
SuiteName = Literal["hilbert", "harmonic", "geometric", "algebraic-linked"]

# kinds that sweep an (eps, N) grid
GRID_KINDS = ("covering-profile", "dim-profile", "rd-curve", "nice-measure", "algebraic")


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AlphabetModel(_Model):
    kind: Literal["interval", "explicit", "torus"] = Field(..., description="Quantized interval, explicit values or torus")
    levels: int = Field(2, ge=1, description="Number of interval levels")
    values: List[float] = Field(default_factory=list, description="Explicit symbol values in [0, 1]")
    r: int = Field(1, ge=1, description="Torus dimension")
    q: int = Field(2, ge=1, description="Torus resolution")

    def to_spec(self) -> AlphabetSpec:
        if self.kind == "interval":
            return AlphabetSpec.interval(self.levels)
        if self.kind == "explicit":
            return AlphabetSpec.explicit(self.values)
        return AlphabetSpec.torus(self.r, self.q)


class ActionModel(_Model):
    r: int = Field(..., ge=1, description="Torus dimension of each coordinate")
    a: int = Field(..., ge=1, description="Constraint window length")
    M: List[List[int]] = Field(default_factory=list, description="Integer constraint rows of length r*a")
    q: int = Field(..., ge=1, description="Quantization of the torus")

    @model_validator(mode="after")
    def _rows(self) -> "ActionModel":
        for row in self.M:
            if len(row) != self.r * self.a:
                raise ValueError(f"constraint rows need r*a = {self.r * self.a} entries, got {len(row)}")
        return self


class SystemModel(_Model):
    kind: Literal["full-shift", "sequence", "algebraic"] = "full-shift"
    alphabet: Optional[AlphabetModel] = None
    k: Optional[int] = Field(None, ge=2, description="Sequence example size {1, 1/2, ..., 1/k, 0}")
    variant: Literal["harmonic", "geometric"] = "harmonic"
    action: Optional[ActionModel] = None
    W: int = Field(1, ge=0, description="Truncation window")
    policy: Literal["exhaustive", "sample"] = "exhaustive"
    sample_count: Optional[int] = Field(None, ge=1, description="Words drawn under the sample policy")
    label: str = ""

    @model_validator(mode="after")
    def _kind_fields(self) -> "SystemModel":
        if self.kind == "full-shift" and self.alphabet is None:
            raise ValueError("full-shift systems need an alphabet")
        if self.kind == "sequence" and self.k is None:
            raise ValueError("sequence systems need k")
        if self.kind == "algebraic" and self.action is None:
            raise ValueError("algebraic systems need an action")
        if self.policy == "sample" and self.sample_count is None:
            raise ValueError("the sample policy needs sample_count")
        return self

    def action_spec(self) -> AlgebraicActionSpec:
        return AlgebraicActionSpec(r=self.action.r, a=self.action.a, M=tuple(tuple(row) for row in self.action.M),
                                   q=self.action.q, W=self.W, label=self.label)

    def build(self, seed: Optional[int] = None) -> SystemSpec:
        policy = EnumerationPolicy.sample(self.sample_count, seed) if self.policy == "sample" else EnumerationPolicy()
        if self.kind == "sequence":
            return build_sequence_example(self.k, self.variant, self.W, policy)
        if self.kind == "algebraic":
            return self.action_spec().to_system(policy)
        alphabet = self.alphabet.to_spec()
        # budgets are enforced when words are enumerated, product covers never enumerate
        return SystemSpec(alphabet=alphabet, W=self.W, policy=policy,
                          label=self.label or f"full-shift-{alphabet.size}")


class MeasureModel(_Model):
    kind: Literal["product", "uniform", "haar"] = "product"
    weights: Optional[List[float]] = Field(None, description="Symbol weights of a product measure")


class GridModel(_Model):
    epsilons: List[float] = Field(default_factory=list, description="Scales eps > 0")
    N: List[int] = Field(default_factory=list, description="Orbit lengths N >= 1")
    s: Optional[float] = Field(None, ge=0, description="Exponent s")
    delta: Optional[float] = Field(None, gt=0, description="Block diameter bound delta")
    tau: float = Field(0.0, ge=0, description="Coarse offset tau")
    proxy_epsilons: Optional[List[float]] = Field(None, description="Scales for the covering proxy")

    @model_validator(mode="after")
    def _positive(self) -> "GridModel":
        if any(e <= 0 for e in self.epsilons + (self.proxy_epsilons or [])):
            raise ValueError("every eps must be positive")
        if any(n < 1 for n in self.N):
            raise ValueError("every N must be >= 1")
        return self


class TilingModel(_Model):
    recipe: Literal["lemma", "periodic"] = "lemma"
    N: int = Field(5, ge=1, description="Minimum gap between positive markers is N + 1")
    M: int = Field(12, ge=2, description="Maximum gap between height-1 markers")
    period: int = Field(4, ge=1)
    height: float = Field(1.0, gt=0, le=1)
    start: Optional[int] = None
    length: int = Field(800, ge=2)
    count: int = Field(1, ge=1, description="Number of traces")
    R: float = Field(300.0, gt=0, description="Window [0, R] for the boundary density")
    shifts: List[int] = Field(default_factory=lambda: [1, 7], description="Shifts checked for equivariance")


class ExpectationModel(_Model):
    target: Optional[float] = None
    low: Optional[float] = None
    high: Optional[float] = None

    def holds(self, value: float) -> bool:
        return (self.low is None or value >= self.low) and (self.high is None or value <= self.high)


class ExperimentModel(_Model):
    name: str = Field(..., min_length=1)
    kind: ExperimentKind
    system: Optional[SystemModel] = None
    grids: GridModel = Field(default_factory=GridModel)
    metric: Literal["max", "avg"] = "max"
    mode: Literal["exact", "greedy", "auto", "product"] = "auto"
    method: Literal["auto", "dense", "separable", "homogeneous"] = "auto"
    measure: MeasureModel = Field(default_factory=MeasureModel)
    headline: Literal["max_n", "envelope", "increment"] = "max_n"
    family: Literal["auto", "all-subsets", "balls"] = "auto"
    cylinder_length: Optional[int] = Field(None, ge=1)
    c: Optional[float] = Field(None, gt=0, lt=1, description="Quantitative Frostman fraction of the dimension")
    tiling: Optional[TilingModel] = None
    suite: Optional[SuiteName] = None
    expect: Optional[ExpectationModel] = None

    @model_validator(mode="after")
    def _kind_fields(self) -> "ExperimentModel":
        if self.kind not in ("tiling", "example-suite") and self.system is None:
            raise ValueError(f"{self.kind} experiments need a system")
        if self.kind in GRID_KINDS and (not self.grids.epsilons or not self.grids.N):
            raise ValueError(f"{self.kind} experiments need nonempty epsilons and N grids")
        if self.kind == "frostman" and not self.grids.N:
            raise ValueError("frostman experiments need an N grid")
        if self.kind in ("frostman", "nice-measure") and self.grids.delta is None:
            raise ValueError(f"{self.kind} experiments need delta")
        if self.kind == "nice-measure" and self.grids.s is None:
            raise ValueError("nice-measure experiments need s")
        if self.kind == "frostman" and self.grids.s is None and self.c is None:
            raise ValueError("frostman experiments need s or c")
        if self.kind == "algebraic" and self.system.kind != "algebraic":
            raise ValueError("algebraic experiments need an algebraic system")
        if self.kind in ("dim-profile", "algebraic") and self.mode == "product":
            raise ValueError(f"product covers do not apply to {self.kind} experiments")
        if self.kind == "tiling" and self.tiling is None:
            raise ValueError("tiling experiments need a tiling block")
        if self.kind == "example-suite" and self.suite is None:
            raise ValueError("example-suite experiments need a suite name")
        return self

    @property
    def samples(self) -> bool:
        """True when the experiment draws random words or traces"""
        random_system = self.system is not None and self.system.policy == "sample"
        random_trace = self.tiling is not None and self.tiling.recipe == "lemma"
        return random_system or random_trace


class BudgetModel(_Model):
    enumeration: Optional[int] = Field(None, ge=1, description="ENUMERATION_BUDGET")
    exact_points: Optional[int] = Field(None, ge=1, description="EXACT_POINT_BUDGET")
    all_subsets: Optional[int] = Field(None, ge=1, description="ALL_SUBSETS_BUDGET")
    dense_rd: Optional[int] = Field(None, ge=1, description="DENSE_RD_BUDGET")
    ba_max_iter: Optional[int] = Field(None, ge=1, description="BA_MAX_ITER")

    def apply(self, lab: LabConfig):
        for name, knob in (("enumeration", "ENUMERATION_BUDGET"), ("exact_points", "EXACT_POINT_BUDGET"),
                           ("all_subsets", "ALL_SUBSETS_BUDGET"), ("dense_rd", "DENSE_RD_BUDGET"),
                           ("ba_max_iter", "BA_MAX_ITER")):
            value = getattr(self, name)
            if value is not None:
                setattr(lab, knob, value)


class OutputModel(_Model):
    dir: str = "results"
    formats: List[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])


class ExperimentConfig(_Model):
    experiments: List[ExperimentModel] = Field(..., min_length=1)
    seed: Optional[int] = Field(None, description="Seed for every sampled word set and random trace")
    budgets: BudgetModel = Field(default_factory=BudgetModel)
    output: OutputModel = Field(default_factory=OutputModel)

    @model_validator(mode="after")
    def _checks(self) -> "ExperimentConfig":
        names = [e.name for e in self.experiments]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"experiment names must be unique, repeated: {duplicates}")
        if self.seed is None and any(e.samples for e in self.experiments):
            raise ValueError("a seed is mandatory when sampling is used")
        return self

    def of_kind(self, kind: str) -> List[ExperimentModel]:
        return [e for e in self.experiments if e.kind == kind]


def _format_errors(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise StructuralError(f"{source} is not valid JSON: {e.msg} at line {e.lineno}, column {e.colno}",
                              module="cli", stage="parse") from e
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise StructuralError(f"{source} failed validation: {_format_errors(e)}", module="cli",
                              stage="validate") from e


def load_config(path: str) -> Tuple[ExperimentConfig, bytes]:
    """Parsed config plus the raw bytes the manifest hashes"""
    file = Path(path)
    if not file.is_file():
        raise StructuralError(f"config file {path} does not exist", module="cli", stage="parse")
    raw = file.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise StructuralError(f"{path} is not UTF-8 text: {e}", module="cli", stage="parse") from e
    return parse_config(text, str(path)), raw


def config_schema() -> dict:
    return ExperimentConfig.model_json_schema()
