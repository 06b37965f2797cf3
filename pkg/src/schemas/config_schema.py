"""
Pydantic schemas for experiment configuration files.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from generator import BimodalMixing, ConstantMixing, LfrParams, MixingMode

AlgorithmName = Literal["fast_greedy", "louvain", "walktrap", "label_propagation", "markov_cluster"]


class MixingSchema(BaseModel):
    """Mixing-coefficient distribution of a regime."""

    kind: Literal["constant", "bimodal"] = Field(
        "bimodal", description="'constant' for classic LFR, 'bimodal' for half-zero mixing"
    )
    mu: Optional[float] = Field(None, description="Constant mixing coefficient", ge=0.0, le=1.0)
    mean: float = Field(0.5, description="Mean of the normal half (bimodal)")
    sd: float = Field(0.2, description="Standard deviation of the normal half (bimodal)", ge=0.0)

    @model_validator(mode="after")
    def _constant_needs_mu(self) -> "MixingSchema":
        if self.kind == "constant" and self.mu is None:
            raise ValueError("constant mixing requires 'mu'")
        return self

    def to_mode(self) -> MixingMode:
        if self.kind == "constant":
            return ConstantMixing(self.mu)
        return BimodalMixing(self.mean, self.sd)


class RegimeSchema(BaseModel):
    """One network regime: LFR parameters shared by all samples."""

    n: int = Field(..., description="Number of nodes", ge=10)
    avg_degree: float = Field(..., description="Target average degree", ge=1.0)
    max_degree: int = Field(..., description="Maximal degree", ge=1)
    gamma: float = Field(3.0, description="Degree exponent", gt=2.0)
    beta: float = Field(2.0, description="Community size exponent", ge=1.0, le=2.0)
    mixing: MixingSchema = Field(default_factory=MixingSchema)

    @model_validator(mode="after")
    def _degree_bounds(self) -> "RegimeSchema":
        if not self.avg_degree <= self.max_degree < self.n:
            raise ValueError("degrees must satisfy avg_degree <= max_degree < n")
        return self

    def to_params(self, seed: int) -> LfrParams:
        return LfrParams(
            n=self.n,
            avg_degree=self.avg_degree,
            max_degree=self.max_degree,
            gamma=self.gamma,
            beta=self.beta,
            mixing=self.mixing.to_mode(),
            seed=seed,
        )


class AlgorithmSchema(BaseModel):
    """A detection run; unset knobs fall back to config.yaml."""

    algorithm: AlgorithmName
    label: Optional[str] = Field(
        None, description="Source tag in the report; defaults to the algorithm id", min_length=1
    )
    seed: Optional[int] = Field(None, description="Fixed seed; defaults to the sample seed")
    walktrap_steps: Optional[int] = Field(None, ge=1)
    walktrap_self_loops: Optional[bool] = None
    mcl_expansion: Optional[int] = Field(None, ge=2)
    mcl_inflation: Optional[float] = Field(None, gt=1.0)
    mcl_prune_threshold: Optional[float] = Field(None, ge=0.0, le=0.01)
    mcl_max_iterations: Optional[int] = Field(None, ge=1)
    lpa_max_sweeps: Optional[int] = Field(None, ge=1)

    def overrides(self) -> dict:
        return self.model_dump(exclude={"algorithm", "label", "seed"}, exclude_none=True)

    @property
    def source(self) -> str:
        return self.label or self.algorithm


class ExternalPartitionSchema(BaseModel):
    """Partition produced by an external tool, one file per regime and sample."""

    name: str = Field(..., description="Source tag used in the report", min_length=1)
    path_template: str = Field(
        ..., description="Path with {regime} and {sample} placeholders"
    )


class ExperimentConfig(BaseModel):
    """Full experiment: regimes x samples x algorithms."""

    regimes: List[RegimeSchema] = Field(..., min_length=1)
    sample_count: int = Field(5, description="Networks generated per regime", ge=1)
    algorithms: List[AlgorithmSchema] = Field(default_factory=list)
    external_partitions: List[ExternalPartitionSchema] = Field(default_factory=list)
    output_dir: Optional[str] = Field(
        None, description="Defaults to the environment or config.yaml"
    )
    master_seed: int = Field(0, description="Root of the per-sample seed fan-out")
    workers: int = Field(1, description="Parallel (regime, sample) cells", ge=1)

    @model_validator(mode="after")
    def _has_sources(self) -> "ExperimentConfig":
        if not self.algorithms and not self.external_partitions:
            raise ValueError("at least one algorithm or external partition is required")
        names = [a.source for a in self.algorithms] + [e.name for e in self.external_partitions]
        if len(set(names)) != len(names):
            raise ValueError("algorithm labels and external partition names must be unique")
        if "reference" in names:
            raise ValueError("'reference' is reserved for the generated partition")
        return self

