"""Encoder building blocks expressed over autodiff primitives."""

import math
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from ..autodiff import Tensor, ops
from ..core.errors import AllMasked, LayerCountMismatch, ShapeMismatch, TooManyComponents
from ..core.types import Activation, JKMode, SidePool


def activate(x: Tensor, activation: Activation) -> Tensor:
    return ops.gelu(x) if activation is Activation.GELU else ops.relu(x)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    out = ops.matmul(x, weight)
    return ops.add_bias(out, bias) if bias is not None else out


def gcn_forward(
    h: Tensor,
    adjacency: Tensor,
    weight: Tensor,
    bias: Optional[Tensor] = None,
    activation: Activation = Activation.RELU,
) -> Tensor:
    """act(Â·H·W + b)."""
    if adjacency.shape != (h.shape[0], h.shape[0]):
        raise ShapeMismatch(f"adjacency {adjacency.shape} does not match {h.shape[0]} nodes")
    return activate(linear(ops.matmul(adjacency, h), weight, bias), activation)


def jumping_knowledge(
    layers: Sequence[Tensor],
    mode: JKMode,
    weight: Optional[Tensor] = None,
    bias: Optional[Tensor] = None,
    expected: Optional[int] = None,
) -> Tensor:
    if not layers or (expected is not None and len(layers) != expected):
        raise LayerCountMismatch(f"expected {expected} layer outputs, got {len(layers)}")
    if len({layer.shape[0] for layer in layers}) != 1:
        raise ShapeMismatch("layer outputs have different row counts")
    if mode is JKMode.LAST:
        return layers[-1]
    if weight is None:
        raise ShapeMismatch("concat_project needs a projection weight")
    return linear(ops.concat_cols(list(layers)), weight, bias)


def attention_pool(
    h: Tensor,
    gate_weight: Tensor,
    gate_bias: Tensor,
    value_weight: Tensor,
    membership: Optional[np.ndarray] = None,
) -> Tuple[Tensor, Tensor]:
    """Softmax-gated sum of atom rows per molecule.

    ``membership`` is molecules × atoms; without it all rows form one molecule.
    Returns molecule vectors (molecules × d) and the weight matrix
    (molecules × atoms, zero outside each molecule).
    """
    n = h.shape[0]
    if n == 0:
        raise AllMasked("attention pooling over zero atoms")
    mask = np.ones((1, n), dtype=bool) if membership is None else np.asarray(membership, dtype=bool)
    if mask.shape[1] != n:
        raise ShapeMismatch(f"membership covers {mask.shape[1]} atoms, input has {n}")

    scores = linear(h, gate_weight, gate_bias)  # n×1
    ones = ops.constant(np.ones((mask.shape[0], 1)), dtype=h.dtype)
    logits = ops.matmul(ones, ops.transpose(scores))  # molecules×n
    weights = ops.softmax_rows(logits, mask=mask)
    values = ops.matmul(h, value_weight)
    return ops.matmul(weights, values), weights


def pad_molecule_set(vecs: Tensor, max_components: int) -> Tuple[Tensor, np.ndarray]:
    """Zero-pad c×h molecule vectors to max_components rows."""
    count = vecs.shape[0]
    if count == 0:
        raise AllMasked("no molecules to pad")
    if count > max_components:
        raise TooManyComponents(f"{count} components exceed max_components={max_components}")
    mask = np.zeros(max_components, dtype=bool)
    mask[:count] = True
    return ops.scatter_rows(vecs, np.arange(count), max_components), mask


def transformer_layer(
    x: Tensor,
    mask: np.ndarray,
    params: Mapping[str, Tensor],
    heads: int,
    activation: Activation = Activation.RELU,
    eps: float = 1e-5,
    groups: Optional[np.ndarray] = None,
) -> Tuple[Tensor, np.ndarray]:
    """Pre-norm self-attention block over the real rows of ``x``.

    Padded rows are dropped before any arithmetic and come back as zeros, so
    the amount of padding never changes the result. ``groups`` restricts
    attention to rows sharing a group id (several reactions in one matrix).
    Returns the new rows and the heads×rows×rows attention (zero where masked).
    """
    rows, width = x.shape
    if width % heads != 0:
        raise ShapeMismatch(f"d_model {width} is not divisible by {heads} heads")
    mask = np.asarray(mask, dtype=bool)
    real = np.flatnonzero(mask)
    if real.size == 0:
        raise AllMasked("transformer input has no real rows")

    h = ops.take_rows(x, real) if real.size != rows else x
    attend = None
    if groups is not None:
        g = np.asarray(groups)[real]
        attend = g[:, None] == g[None, :]

    normed = ops.layer_norm(h, params["ln1.gamma"], params["ln1.beta"], eps)
    q = ops.split_heads(linear(normed, params["attn.q.weight"], params["attn.q.bias"]), heads)
    k = ops.split_heads(linear(normed, params["attn.k.weight"], params["attn.k.bias"]), heads)
    v = ops.split_heads(linear(normed, params["attn.v.weight"], params["attn.v.bias"]), heads)
    scores = ops.scale(ops.batched_matmul(q, k, transpose_b=True), 1.0 / math.sqrt(width // heads))
    attn = ops.softmax_rows(scores, mask=attend)
    context = ops.merge_heads(ops.batched_matmul(attn, v))
    h = ops.add(h, linear(context, params["attn.o.weight"], params["attn.o.bias"]))

    normed = ops.layer_norm(h, params["ln2.gamma"], params["ln2.beta"], eps)
    hidden = activate(linear(normed, params["ffn.in.weight"], params["ffn.in.bias"]), activation)
    h = ops.add(h, linear(hidden, params["ffn.out.weight"], params["ffn.out.bias"]))

    full_attn = np.zeros((heads, rows, rows), dtype=attn.dtype)
    full_attn[:, real[:, None], real[None, :]] = attn.data
    if real.size != rows:
        h = ops.scatter_rows(h, real, rows)
    return h, full_attn


def side_pool(
    x: Tensor,
    mask: np.ndarray,
    mode: SidePool = SidePool.MEAN,
    groups: Optional[np.ndarray] = None,
) -> Tensor:
    """Masked mean (or sum) of molecule rows; one output row per group."""
    mask = np.asarray(mask, dtype=bool)
    real = np.flatnonzero(mask)
    if real.size == 0:
        raise AllMasked("side pooling over an empty molecule set")
    rows = ops.take_rows(x, real) if real.size != x.shape[0] else x

    if groups is None:
        return ops.mean_rows(rows) if mode is SidePool.MEAN else ops.sum_rows(rows)

    g = np.asarray(groups)[real]
    ids = np.unique(g)
    pooling = (ids[:, None] == g[None, :]).astype(x.dtype)
    if mode is SidePool.MEAN:
        pooling = pooling / pooling.sum(axis=1, keepdims=True)
    return ops.matmul(ops.constant(pooling, dtype=x.dtype), rows)


def interaction_embed(r: Tensor, p: Tensor, params: Mapping[str, Tensor], eps: float = 1e-5) -> Tensor:
    """[r ‖ p ‖ p − r] → linear → layer norm → linear."""
    if r.shape != p.shape:
        raise ShapeMismatch(f"reactant {r.shape} and product {p.shape} vectors differ")
    z = ops.concat_cols([r, p, ops.sub(p, r)])
    hidden = linear(z, params["interaction.in.weight"], params["interaction.in.bias"])
    hidden = ops.layer_norm(hidden, params["interaction.norm.gamma"], params["interaction.norm.beta"], eps)
    return linear(hidden, params["interaction.out.weight"], params["interaction.out.bias"])


def classifier_logit(emb: Tensor, params: Mapping[str, Tensor]) -> Tensor:
    return linear(emb, params["classifier.weight"], params["classifier.bias"])


def classify_real(emb: Tensor, params: Mapping[str, Tensor]) -> Tensor:
    """Probability that each embedding row is a real reaction."""
    return ops.sigmoid(classifier_logit(emb, params))


def scoped(params: Mapping[str, Tensor], prefix: str) -> dict:
    """View of the parameters under ``prefix`` with the prefix stripped."""
    return {name[len(prefix) :]: t for name, t in params.items() if name.startswith(prefix)}
