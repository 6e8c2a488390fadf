"""Dual-encoder reaction model: parameters, forward pass and embedding."""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from ..autodiff import Tensor
from ..chem.graph import Reaction
from ..core.errors import CheckpointError, TooManyComponents
from ..core.types import EncoderConfig, JKMode
from ..utils.workers import map_ordered
from .featurize import ATOM_FEATURE_DIM, SideGraphs, merge_sides, prepare_side
from .layers import (
    attention_pool,
    classifier_logit,
    gcn_forward,
    interaction_embed,
    jumping_knowledge,
    pad_molecule_set,
    scoped,
    side_pool,
    transformer_layer,
)

SIDES = ("reactant", "product")


def parameter_shapes(config: EncoderConfig) -> Dict[str, Tuple[int, ...]]:
    """Ordered name → shape map for every trainable tensor."""
    h, d = config.gnn_hidden, config.d_model
    shapes: Dict[str, Tuple[int, ...]] = {}
    for side in SIDES:
        p = f"{side}."
        d_in = ATOM_FEATURE_DIM
        for layer in range(config.gnn_layers):
            shapes[f"{p}gcn.{layer}.weight"] = (d_in, h)
            shapes[f"{p}gcn.{layer}.bias"] = (h,)
            d_in = h
        if config.jk_mode is JKMode.CONCAT_PROJECT:
            shapes[f"{p}jk.weight"] = (h * config.gnn_layers, h)
            shapes[f"{p}jk.bias"] = (h,)
        shapes[f"{p}pool.gate.weight"] = (h, 1)
        shapes[f"{p}pool.gate.bias"] = (1,)
        shapes[f"{p}pool.value.weight"] = (h, d)
        for layer in range(config.tf_layers):
            t = f"{p}tf.{layer}."
            shapes[f"{t}ln1.gamma"] = (d,)
            shapes[f"{t}ln1.beta"] = (d,)
            for proj in ("q", "k", "v", "o"):
                shapes[f"{t}attn.{proj}.weight"] = (d, d)
                shapes[f"{t}attn.{proj}.bias"] = (d,)
            shapes[f"{t}ln2.gamma"] = (d,)
            shapes[f"{t}ln2.beta"] = (d,)
            shapes[f"{t}ffn.in.weight"] = (d, config.ffn_dim)
            shapes[f"{t}ffn.in.bias"] = (config.ffn_dim,)
            shapes[f"{t}ffn.out.weight"] = (config.ffn_dim, d)
            shapes[f"{t}ffn.out.bias"] = (d,)
    e = config.emb_dim
    shapes["interaction.in.weight"] = (3 * d, e)
    shapes["interaction.in.bias"] = (e,)
    shapes["interaction.norm.gamma"] = (e,)
    shapes["interaction.norm.beta"] = (e,)
    shapes["interaction.out.weight"] = (e, e)
    shapes["interaction.out.bias"] = (e,)
    shapes["classifier.weight"] = (e, 1)
    shapes["classifier.bias"] = (1,)
    return shapes


@dataclass
class ModelCheckpoint:
    """Encoder configuration plus every named parameter array."""

    config: EncoderConfig
    parameters: Dict[str, np.ndarray]
    rng_seed: int = 0

    def __post_init__(self) -> None:
        expected = parameter_shapes(self.config)
        missing = sorted(set(expected) - set(self.parameters))
        extra = sorted(set(self.parameters) - set(expected))
        if missing or extra:
            raise CheckpointError(f"parameter names do not match config (missing {missing[:3]}, extra {extra[:3]})")
        for name, shape in expected.items():
            if self.parameters[name].shape != shape:
                raise CheckpointError(f"{name} has shape {self.parameters[name].shape}, config needs {shape}")
        # keep a stable order
        self.parameters = {name: self.parameters[name] for name in expected}

    @classmethod
    def init(cls, config: EncoderConfig, seed: int = 0, dtype=np.float32) -> "ModelCheckpoint":
        """Glorot-uniform weights, zero biases and shifts, unit gains."""
        rng = np.random.default_rng(seed)
        params: Dict[str, np.ndarray] = {}
        for name, shape in parameter_shapes(config).items():
            if name.endswith(".gamma"):
                params[name] = np.ones(shape, dtype=dtype)
            elif len(shape) == 2:
                limit = np.sqrt(6.0 / (shape[0] + shape[1]))
                params[name] = rng.uniform(-limit, limit, size=shape).astype(dtype)
            else:
                params[name] = np.zeros(shape, dtype=dtype)
        return cls(config, params, seed)

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.parameters.values())).dtype

    def astype(self, dtype) -> "ModelCheckpoint":
        return ModelCheckpoint(self.config, {k: v.astype(dtype) for k, v in self.parameters.items()}, self.rng_seed)

    def with_parameters(self, parameters: Mapping[str, np.ndarray]) -> "ModelCheckpoint":
        return ModelCheckpoint(self.config, dict(parameters), self.rng_seed)

    def tensors(self, requires_grad: bool = False) -> Dict[str, Tensor]:
        return {
            name: Tensor(value, requires_grad=requires_grad, name=name, dtype=value.dtype)
            for name, value in self.parameters.items()
        }

    def side_parameter_names(self, side: str) -> List[str]:
        return [name for name in self.parameters if name.startswith(f"{side}.")]


@dataclass
class AttentionBundle:
    """Pooling and Transformer attention recorded while embedding one reaction."""

    pool_weights: Dict[str, List[np.ndarray]] = field(default_factory=dict)
    layer_attention: Dict[str, List[np.ndarray]] = field(default_factory=dict)
    masks: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class PreparedReaction:
    """Featurized sides of a reaction, reusable across epochs."""

    reaction: Reaction
    reactant: SideGraphs
    product: SideGraphs

    def side(self, name: str) -> SideGraphs:
        return self.reactant if name == "reactant" else self.product


def prepare_reaction(rxn: Reaction, config: EncoderConfig, dtype=np.float32) -> PreparedReaction:
    for side, components in rxn.sides():
        if len(components) > config.max_components:
            raise TooManyComponents(
                f"reaction {rxn.id!r} has {len(components)} {side} components "
                f"(max_components={config.max_components})"
            )
    return PreparedReaction(
        rxn,
        prepare_side(rxn.reactant_components, dtype),
        prepare_side(rxn.product_components, dtype),
    )


def _molecule_vectors(params: Mapping[str, Tensor], config: EncoderConfig, graphs: SideGraphs) -> Tuple[Tensor, Tensor]:
    dtype = params["gcn.0.weight"].dtype
    adjacency = Tensor(graphs.adjacency, dtype=dtype)
    h = Tensor(graphs.features, dtype=dtype)
    outputs = []
    for layer in range(config.gnn_layers):
        h = gcn_forward(
            h, adjacency, params[f"gcn.{layer}.weight"], params[f"gcn.{layer}.bias"], config.activation
        )
        outputs.append(h)
    nodes = jumping_knowledge(
        outputs, config.jk_mode, params.get("jk.weight"), params.get("jk.bias"), expected=config.gnn_layers
    )
    return attention_pool(
        nodes,
        params["pool.gate.weight"],
        params["pool.gate.bias"],
        params["pool.value.weight"],
        membership=graphs.membership,
    )


def encode_side(
    params: Mapping[str, Tensor],
    config: EncoderConfig,
    sides: Sequence[SideGraphs],
    pad_to: Optional[int] = None,
) -> Tuple[Tensor, Tensor, List[np.ndarray], np.ndarray]:
    """Side vectors (one row per reaction) from one encoder set.

    ``params`` is already scoped to a side. With ``pad_to`` a single reaction
    goes through the padded path; otherwise reactions are stacked and kept
    apart by group-restricted attention.
    """
    merged = merge_sides(sides)
    mol_vecs, pool = _molecule_vectors(params, config, merged)

    if pad_to is not None:
        if len(sides) != 1:
            raise ValueError("padded encoding handles one reaction at a time")
        x, mask = pad_molecule_set(mol_vecs, pad_to)
        groups = None
    else:
        x = mol_vecs
        mask = np.ones(mol_vecs.shape[0], dtype=bool)
        groups = np.repeat(np.arange(len(sides)), [s.num_molecules for s in sides])

    attention = []
    for layer in range(config.tf_layers):
        x, attn = transformer_layer(
            x,
            mask,
            scoped(params, f"tf.{layer}."),
            config.tf_heads,
            config.activation,
            config.layer_norm_eps,
            groups=groups,
        )
        attention.append(attn)
    return side_pool(x, mask, config.side_pool, groups), pool, attention, mask


def forward(
    params: Mapping[str, Tensor],
    config: EncoderConfig,
    batch: Sequence[PreparedReaction],
) -> Tuple[Tensor, Tensor]:
    """Embeddings (B×emb_dim) and classifier logits (B×1) for a batch."""
    vectors = {}
    for side in SIDES:
        vectors[side], _, _, _ = encode_side(
            scoped(params, f"{side}."), config, [item.side(side) for item in batch]
        )
    emb = interaction_embed(vectors["reactant"], vectors["product"], params, config.layer_norm_eps)
    return emb, classifier_logit(emb, params)


def reaction_logits(model: ModelCheckpoint, reactions: Sequence[Reaction]) -> np.ndarray:
    """Classifier logits for reactions, outside any tape."""
    batch = [prepare_reaction(r, model.config, model.dtype) for r in reactions]
    _, logits = forward(model.tensors(), model.config, batch)
    return logits.data.reshape(-1).copy()


def embed_reactions(
    model: ModelCheckpoint,
    reactions: Sequence[Reaction],
    batch_size: int = 64,
    workers: int = 1,
) -> np.ndarray:
    """Embedding matrix (one row per reaction) via batched forward passes.

    Batches are fixed by position, so the result does not depend on
    ``workers``.
    """
    config = model.config
    params = model.tensors()
    batches = [reactions[start : start + batch_size] for start in range(0, len(reactions), batch_size)]

    def run(batch: Sequence[Reaction]) -> np.ndarray:
        prepared = [prepare_reaction(r, config, model.dtype) for r in batch]
        emb, _ = forward(params, config, prepared)
        return emb.data.copy()

    parts = map_ordered(run, batches, workers)
    if not parts:
        return np.zeros((0, config.emb_dim), dtype=model.dtype)
    return np.vstack(parts)


def embed_reaction(
    model: ModelCheckpoint, rxn: Reaction, max_components: Optional[int] = None
) -> Tuple[np.ndarray, AttentionBundle]:
    """RXNEmb vector for one reaction plus the attention recorded on the way."""
    config = model.config
    pad_to = max_components if max_components is not None else config.max_components
    prepared = prepare_reaction(rxn, config.model_copy(update={"max_components": pad_to}), model.dtype)
    params = model.tensors()
    bundle = AttentionBundle()

    vectors = {}
    for side in SIDES:
        graphs = prepared.side(side)
        vectors[side], pool, attention, mask = encode_side(
            scoped(params, f"{side}."), config, [graphs], pad_to=pad_to
        )
        weights = pool.data
        bundle.pool_weights[side] = [
            weights[j, graphs.membership[j]].copy() for j in range(graphs.num_molecules)
        ]
        bundle.layer_attention[side] = attention
        bundle.masks[side] = mask

    emb = interaction_embed(vectors["reactant"], vectors["product"], params, config.layer_norm_eps)
    return emb.data.reshape(-1).copy(), bundle


def classify_reaction(model: ModelCheckpoint, rxn: Reaction) -> float:
    """p(real) for one reaction."""
    return float(expit(reaction_logits(model, [rxn])[0]))
