from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, List, Optional, Union
from enum import Enum

from pkgnet.models.knowledge import KGEdit, KGVariant


class Environment(str, Enum):
    """Game environments"""
    SOKOBAN = "sokoban"
    PACMAN = "pacman"


class Algorithm(str, Enum):
    """Training algorithms"""
    DQN = "dqn"
    PER = "per"
    A2C = "a2c"


class ModelKind(str, Enum):
    """Network architectures"""
    PKGNET = "pkgnet"
    BASELINE = "baseline"
    PKGNET_NO_SIDEBRANCH = "pkgnet-no-sidebranch"


class EvalSplit(str, Enum):
    TRAIN = "train"
    TEST = "test"


SOKOBAN_LEARNING_RATE = 1e-4
PACMAN_LEARNING_RATE = 2.5e-4


class TrainConfig(BaseModel):
    """Learning hyper-parameters shared by DQN, PER and A2C"""
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(default=SOKOBAN_LEARNING_RATE, ge=0, description="Adam step size")
    batch_size: int = Field(default=32, ge=1, description="Transitions per DQN update")
    warmup_steps: int = Field(default=10_000, ge=0, description="Environment steps before the first update")
    gamma: float = Field(default=0.99, gt=0, le=1, description="Discount factor")
    epsilon_start: float = Field(default=1.0, ge=0, le=1)
    epsilon_end: float = Field(default=0.05, ge=0, le=1)
    epsilon_decay_steps: int = Field(default=50_000, ge=0, description="Steps of linear ε decay")
    target_sync: int = Field(default=1_000, ge=1, description="Training steps between target-network syncs")
    buffer_capacity: int = Field(default=100_000, ge=1)
    per_alpha: float = Field(default=0.6, ge=0)
    per_beta_start: float = Field(default=0.4, ge=0, le=1)
    per_beta_end: float = Field(default=1.0, ge=0, le=1)
    per_epsilon: float = Field(default=1e-3, gt=0)
    rollout_length: int = Field(default=5, ge=1, description="A2C steps per update")
    value_coef: float = Field(default=0.5, ge=0)
    entropy_coef: float = Field(default=0.01, ge=0)


class ExperimentConfig(BaseModel):
    """One experiment: a configuration trained once per seed"""
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    name: str = Field(..., min_length=1, description="Experiment name; also the records directory")
    environment: Environment = Field(default=Environment.SOKOBAN)
    variation: str = Field(default="one-one", description="Sokoban variation")
    layout: str = Field(default="smallGrid", description="Pacman training layout")
    test_layout: Optional[str] = Field(None, description="Pacman layout evaluated as the test split")
    algorithm: Algorithm = Field(default=Algorithm.DQN)
    model: ModelKind = Field(default=ModelKind.PKGNET)
    kg_variant: KGVariant = Field(default=KGVariant.BASE)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    episodes: int = Field(default=5_000, ge=0, description="Training episodes per seed")
    eval_every: int = Field(default=50, ge=1, description="Episodes between evaluations")
    eval_episodes: int = Field(default=10, ge=1, description="Pacman evaluation episodes per split")
    num_train_mazes: int = Field(default=100, ge=1)
    num_test_mazes: int = Field(default=20, ge=1)
    maze_seed: int = Field(default=0, description="Seed of the train/test maze sets")
    max_steps: Optional[int] = Field(None, ge=1, description="Episode cap; environment default when unset")
    train: TrainConfig = Field(default_factory=TrainConfig)
    output_dir: Optional[str] = Field(None, description="Records root; the CLI --output flag overrides it")

    @field_validator("seeds")
    @classmethod
    def seeds_distinct(cls, seeds: List[int]) -> List[int]:
        if len(set(seeds)) != len(seeds):
            raise ValueError(f"seeds must be distinct, got {seeds}")
        return seeds

    @model_validator(mode="after")
    def environment_defaults(self) -> "ExperimentConfig":
        if self.environment == Environment.PACMAN and "learning_rate" not in self.train.model_fields_set:
            self.train = self.train.model_copy(update={"learning_rate": PACMAN_LEARNING_RATE})
        if self.environment == Environment.PACMAN and self.kg_variant != KGVariant.BASE:
            raise ValueError("knowledge-graph variants are only defined for Sokoban")
        return self


class EpisodeRecord(BaseModel):
    """One training episode"""
    model_config = ConfigDict(populate_by_name=True)

    episode: int
    episode_return: float = Field(..., alias="return")
    steps: int
    success: bool
    epsilon: float
    wall_time: float = Field(..., description="Seconds since the run started")


class EvalRecord(BaseModel):
    """Greedy evaluation over one maze set"""
    episode: int = Field(..., description="Training episodes completed before this evaluation")
    split: EvalSplit
    success_rate: float
    mean_return: float
    mean_steps: float
    episodes: int


class RunRecord(BaseModel):
    """Everything persisted for one seed of an experiment"""
    config: ExperimentConfig
    seed: int
    episodes: List[EpisodeRecord] = Field(default_factory=list)
    evals: List[EvalRecord] = Field(default_factory=list)
    checkpoint: Optional[str] = None
    status: str = "completed"


class ManipulationScenario(BaseModel):
    """Evaluate a trained agent after editing its knowledge graph"""
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    checkpoint: str = Field(..., description="Path to a PKGN1 checkpoint written by training")
    edits: Union[str, List[KGEdit]] = Field(default_factory=list, description="Edit script path or inline edits")
    episodes: int = Field(default=100, ge=1)
    split: EvalSplit = Field(default=EvalSplit.TEST)
    seed: int = 0
    note: Optional[str] = Field(None, description="Expected behaviour, for the report")


class ManipulationResult(BaseModel):
    name: str
    episodes: int
    mean_return: float
    stderr_return: float
    success_rate: float
    event_counts: Dict[str, int] = Field(default_factory=dict)
    traces: Optional[str] = Field(None, description="JSON-lines file of per-episode traces")


class SuiteManipulation(BaseModel):
    """A bundled edit script run against the suite's trained agent"""
    model_config = ConfigDict(extra="forbid")

    name: str
    edits: str = Field(..., description="Bundled edit-script name or path")
    split: EvalSplit = Field(default=EvalSplit.TEST)
    episodes: int = Field(default=100, ge=1)
    note: Optional[str] = None


class ReproductionSuite(BaseModel):
    """Experiments, plot and manipulations behind one reproduced figure or table"""
    model_config = ConfigDict(extra="forbid")

    figure: str
    description: str
    plot: str = Field(..., description="Plot kind emitted after training")
    experiments: List[ExperimentConfig] = Field(..., min_length=1)
    manipulations: List[SuiteManipulation] = Field(default_factory=list)

    @model_validator(mode="after")
    def names_unique(self) -> "ReproductionSuite":
        names = [e.name for e in self.experiments]
        if len(set(names)) != len(names):
            raise ValueError(f"experiment names must be unique, got {names}")
        if self.manipulations and len(self.experiments) != 1:
            raise ValueError("manipulations need exactly one trained experiment")
        return self
