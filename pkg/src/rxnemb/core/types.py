"""Configuration models and shared enums for RXNEmb."""

from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

RGB = Tuple[int, int, int]


class JKMode(str, Enum):
    """How the GCN layer outputs become node representations."""

    CONCAT_PROJECT = "concat_project"
    LAST = "last"


class Activation(str, Enum):
    """Nonlinearity used by GCN layers and the feed-forward blocks."""

    RELU = "relu"
    GELU = "gelu"


class SidePool(str, Enum):
    """Reduction of the molecule set of one side to a single vector."""

    MEAN = "mean"
    SUM = "sum"


class Metric(str, Enum):
    """Distance metric over embeddings."""

    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


class GroupDistance(str, Enum):
    """Definition of the distance between two clusters."""

    MEAN = "mean"
    AVERAGE_PAIRWISE = "average_pairwise"
    MEDOID = "medoid"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)


class EncoderConfig(_Strict):
    """Architecture hyperparameters of the reaction encoder."""

    gnn_hidden: int = Field(64, ge=1)
    gnn_layers: int = Field(4, ge=1)
    jk_mode: JKMode = JKMode.CONCAT_PROJECT
    d_model: int = Field(64, ge=1)
    tf_layers: int = Field(4, ge=1)
    tf_heads: int = Field(4, ge=1)
    ffn_dim: int = Field(128, ge=1)
    emb_dim: int = Field(128, ge=1)
    max_components: int = Field(16, ge=1)
    activation: Activation = Activation.RELU
    side_pool: SidePool = SidePool.MEAN
    layer_norm_eps: float = Field(1e-5, gt=0)

    @property
    def atom_feature_dim(self) -> int:
        # element 11 + degree 6 + charge 5 + aromatic 1 + hydrogens 5
        return 28

    @model_validator(mode="after")
    def _heads_divide_model(self) -> "EncoderConfig":
        if self.d_model % self.tf_heads != 0:
            raise ValueError(
                f"d_model ({self.d_model}) must be divisible by tf_heads ({self.tf_heads})"
            )
        return self


class TrainConfig(_Strict):
    """Pre-training loop settings."""

    epochs: int = Field(30, ge=1)
    batch_size: int = Field(16, ge=1)
    lr: float = Field(1e-3, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    adam_eps: float = Field(1e-8, gt=0)
    seed: int = 0
    train_fraction: float = Field(0.8, gt=0, lt=1)
    val_fraction: float = Field(0.1, ge=0, lt=1)
    test_fraction: float = Field(0.1, ge=0, lt=1)
    patience: int = Field(5, ge=1)

    @model_validator(mode="after")
    def _fractions_sum_to_one(self) -> "TrainConfig":
        total = self.train_fraction + self.val_fraction + self.test_fraction
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {total}")
        return self


class CorpusConfig(_Strict):
    """Where pre-training reactions come from."""

    corpus: Optional[Path] = None
    synth: Optional[int] = Field(None, ge=1)
    max_resample: int = Field(10, ge=1)


class ClusterConfig(_Strict):
    """Reclassification settings."""

    k: int = Field(50, ge=2)
    metric: Metric = Metric.EUCLIDEAN
    group_distance: GroupDistance = GroupDistance.MEAN


class ProjectionConfig(_Strict):
    """2-D projection settings."""

    n_neighbors: int = Field(15, ge=2)
    min_dist: float = Field(0.1, gt=0, lt=2)
    spread: float = Field(1.0, gt=0)
    n_epochs: int = Field(300, ge=1)
    negative_sample_rate: int = Field(5, ge=0)
    learning_rate: float = Field(1.0, gt=0)
    init_scale: float = Field(10.0, gt=0)
    standardize: bool = True
    batch_size: int = Field(256, ge=1)
    max_points: int = Field(50_000, ge=2)


class VizConfig(_Strict):
    """Colormap endpoints and drawing sizes."""

    attention_low: RGB = (255, 228, 225)
    attention_high: RGB = (139, 0, 0)
    heatmap_near: RGB = (5, 48, 97)
    heatmap_mid: RGB = (247, 247, 247)
    heatmap_far: RGB = (255, 0, 0)
    cell_size: int = Field(12, ge=2)
    palette: List[str] = Field(
        default_factory=lambda: [
            "#1f77b4",
            "#ff7f0e",
            "#2ca02c",
            "#d62728",
            "#9467bd",
            "#8c564b",
            "#e377c2",
            "#7f7f7f",
        ]
    )

    @model_validator(mode="after")
    def _heatmap_red_rises(self) -> "VizConfig":
        reds = [self.heatmap_near[0], self.heatmap_mid[0], self.heatmap_far[0]]
        if reds != sorted(reds):
            raise ValueError(f"heatmap red channel must not decrease from near to far, got {reds}")
        return self


class PipelineConfig(_Strict):
    """Root configuration shared by every command."""

    seed: int = 0
    threads: int = Field(1, ge=1)
    log_level: str = "INFO"
    output_dir: Path = Path("runs")

    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    cluster: ClusterConfig = Field(default_factory=ClusterConfig)
    projection: ProjectionConfig = Field(default_factory=ProjectionConfig)
    viz: VizConfig = Field(default_factory=VizConfig)
