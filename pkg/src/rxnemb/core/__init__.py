"""Core types, configuration and errors for RXNEmb."""

from .config import ConfigManager, load_config
from .errors import ConfigError, DataError, RxnEmbError
from .types import (
    Activation,
    ClusterConfig,
    CorpusConfig,
    EncoderConfig,
    GroupDistance,
    JKMode,
    Metric,
    PipelineConfig,
    ProjectionConfig,
    SidePool,
    TrainConfig,
    VizConfig,
)

__all__ = [
    "Activation",
    "ClusterConfig",
    "ConfigError",
    "ConfigManager",
    "CorpusConfig",
    "DataError",
    "EncoderConfig",
    "GroupDistance",
    "JKMode",
    "Metric",
    "PipelineConfig",
    "ProjectionConfig",
    "RxnEmbError",
    "SidePool",
    "TrainConfig",
    "VizConfig",
    "load_config",
]
