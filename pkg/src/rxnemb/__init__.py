"""RXNEmb: reaction embeddings from a dual graph/Transformer encoder."""

__version__ = "0.1.0"

from .core.config import ConfigManager, load_config
from .core.types import EncoderConfig, PipelineConfig, TrainConfig

__all__ = [
    "ConfigManager",
    "EncoderConfig",
    "PipelineConfig",
    "TrainConfig",
    "load_config",
    "__version__",
]
