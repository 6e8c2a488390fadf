"""Reaction encoder: GCN over molecules, Transformer over molecule sets."""

from .checkpoint import checkpoint_bytes, load_checkpoint, parse_checkpoint, save_checkpoint
from .featurize import (
    ATOM_FEATURE_DIM,
    SideGraphs,
    featurize_atoms,
    normalize_adjacency,
    prepare_side,
)
from .layers import (
    attention_pool,
    classify_real,
    gcn_forward,
    interaction_embed,
    jumping_knowledge,
    pad_molecule_set,
    side_pool,
    transformer_layer,
)
from .model import (
    SIDES,
    AttentionBundle,
    ModelCheckpoint,
    PreparedReaction,
    classify_reaction,
    embed_reaction,
    embed_reactions,
    encode_side,
    forward,
    parameter_shapes,
    prepare_reaction,
    reaction_logits,
)

__all__ = [
    "ATOM_FEATURE_DIM",
    "AttentionBundle",
    "ModelCheckpoint",
    "PreparedReaction",
    "SIDES",
    "SideGraphs",
    "attention_pool",
    "checkpoint_bytes",
    "classify_reaction",
    "classify_real",
    "embed_reaction",
    "embed_reactions",
    "encode_side",
    "featurize_atoms",
    "forward",
    "gcn_forward",
    "interaction_embed",
    "jumping_knowledge",
    "load_checkpoint",
    "normalize_adjacency",
    "pad_molecule_set",
    "parameter_shapes",
    "parse_checkpoint",
    "prepare_reaction",
    "prepare_side",
    "reaction_logits",
    "save_checkpoint",
    "side_pool",
    "transformer_layer",
]
