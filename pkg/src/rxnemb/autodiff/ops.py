"""Differentiable primitives.

Shapes are explicit: vectors travel as 1×n rows, and the only broadcast is the
row-wise bias in :func:`add_bias`.
"""

import math
from typing import Optional, Sequence

import numpy as np
from scipy.special import erf, expit

from ..core.errors import AllMaskedRow, ShapeMismatch
from .tensor import Tensor, record

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ShapeMismatch(message)


def constant(data, dtype=None) -> Tensor:
    """Untracked tensor; ``dtype`` defaults to float32."""
    return Tensor(data) if dtype is None else Tensor(data, dtype=dtype)


# --- linear algebra ---------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    _require(a.ndim == 2 and b.ndim == 2, f"matmul needs 2-D operands, got {a.shape} and {b.shape}")
    _require(a.shape[1] == b.shape[0], f"matmul inner dims differ: {a.shape} · {b.shape}")
    A, B = a.data, b.data
    return record("matmul", A @ B, (a, b), lambda g: (g @ B.T, A.T @ g))


def batched_matmul(a: Tensor, b: Tensor, transpose_b: bool = False) -> Tensor:
    """Per-head product of h×m×k and h×k×n (or h×n×k with ``transpose_b``)."""
    _require(a.ndim == 3 and b.ndim == 3, f"batched_matmul needs 3-D operands, got {a.shape} and {b.shape}")
    A, B = a.data, b.data
    Bm = np.swapaxes(B, 1, 2) if transpose_b else B
    _require(
        A.shape[0] == Bm.shape[0] and A.shape[2] == Bm.shape[1],
        f"batched_matmul shapes differ: {a.shape} · {b.shape}",
    )

    def grad(g):
        ga = g @ np.swapaxes(Bm, 1, 2)
        gb = np.swapaxes(A, 1, 2) @ g
        return ga, (np.swapaxes(gb, 1, 2) if transpose_b else gb)

    return record("batched_matmul", A @ Bm, (a, b), grad)


def transpose(x: Tensor) -> Tensor:
    _require(x.ndim == 2, f"transpose needs a 2-D tensor, got {x.shape}")
    return record("transpose", x.data.T.copy(), (x,), lambda g: (g.T,))


# --- elementwise ------------------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    _require(a.shape == b.shape, f"add shapes differ: {a.shape} vs {b.shape}")
    return record("add", a.data + b.data, (a, b), lambda g: (g, g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _require(a.shape == b.shape, f"sub shapes differ: {a.shape} vs {b.shape}")
    return record("sub", a.data - b.data, (a, b), lambda g: (g, -g))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _require(a.shape == b.shape, f"mul shapes differ: {a.shape} vs {b.shape}")
    A, B = a.data, b.data
    return record("mul", A * B, (a, b), lambda g: (g * B, g * A))


def scale(x: Tensor, factor: float) -> Tensor:
    f = x.dtype.type(factor)
    return record("scale", x.data * f, (x,), lambda g: (g * f,))


def add_bias(x: Tensor, bias: Tensor) -> Tensor:
    """Add a length-n bias to every row of an m×n tensor."""
    _require(x.ndim == 2, f"add_bias needs a 2-D input, got {x.shape}")
    _require(bias.shape in ((x.shape[1],), (1, x.shape[1])), f"bias {bias.shape} does not fit rows of {x.shape}")
    flat = bias.data.reshape(-1)
    return record(
        "add_bias",
        x.data + flat,
        (x, bias),
        lambda g: (g, g.sum(axis=0).reshape(bias.shape)),
    )


def relu(x: Tensor) -> Tensor:
    X = x.data
    positive = X > 0
    return record("relu", np.where(positive, X, 0).astype(X.dtype), (x,), lambda g: (g * positive,))


def gelu(x: Tensor) -> Tensor:
    """Exact GELU, x·Φ(x)."""
    X = x.data
    cdf = 0.5 * (1.0 + erf(X * _INV_SQRT2))
    pdf = np.exp(-0.5 * X * X) * _INV_SQRT_2PI
    out = (X * cdf).astype(X.dtype)
    deriv = (cdf + X * pdf).astype(X.dtype)
    return record("gelu", out, (x,), lambda g: (g * deriv,))


def sigmoid(x: Tensor) -> Tensor:
    s = expit(x.data).astype(x.dtype)
    return record("sigmoid", s, (x,), lambda g: (g * s * (1 - s),))


# --- normalization and attention --------------------------------------------


def softmax_rows(x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    """Softmax over the last axis; ``mask`` marks entries to keep.

    Masked entries come out exactly zero. Works on 2-D and 3-D input.
    """
    X = x.data
    if mask is None:
        keep = np.ones(X.shape, dtype=bool)
    else:
        try:
            keep = np.broadcast_to(np.asarray(mask, dtype=bool), X.shape)
        except ValueError as e:
            raise ShapeMismatch(f"mask {np.shape(mask)} does not fit {X.shape}") from e
    if not keep.any(axis=-1).all():
        raise AllMaskedRow("softmax row has every entry masked")

    shifted = np.where(keep, X, -np.inf)
    shifted = shifted - shifted.max(axis=-1, keepdims=True)
    e = np.where(keep, np.exp(shifted), 0)
    y = (e / e.sum(axis=-1, keepdims=True)).astype(X.dtype)

    def grad(g):
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return record("softmax_rows", y, (x,), grad)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    _require(x.ndim == 2, f"layer_norm needs a 2-D input, got {x.shape}")
    n = x.shape[1]
    _require(gamma.data.size == n, f"gamma has {gamma.data.size} entries for width {n}")
    _require(beta.data.size == n, f"beta has {beta.data.size} entries for width {n}")
    X = x.data
    G = gamma.data.reshape(-1)
    mean = X.mean(axis=1, keepdims=True)
    centered = X - mean
    var = (centered * centered).mean(axis=1, keepdims=True)
    inv = 1.0 / np.sqrt(var + x.dtype.type(eps))
    xhat = centered * inv
    out = (xhat * G + beta.data.reshape(-1)).astype(X.dtype)

    def grad(g):
        dxhat = g * G
        dx = inv / n * (n * dxhat - dxhat.sum(axis=1, keepdims=True) - xhat * (dxhat * xhat).sum(axis=1, keepdims=True))
        return dx, (g * xhat).sum(axis=0).reshape(gamma.shape), g.sum(axis=0).reshape(beta.shape)

    return record("layer_norm", out, (x, gamma, beta), grad)


# --- structural -------------------------------------------------------------


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    _require(len(parts) > 0, "concat_rows needs at least one tensor")
    widths = {p.shape[1:] for p in parts}
    _require(len(widths) == 1, f"concat_rows trailing shapes differ: {sorted(widths)}")
    bounds = np.cumsum([p.shape[0] for p in parts])[:-1]
    return record(
        "concat_rows",
        np.concatenate([p.data for p in parts], axis=0),
        tuple(parts),
        lambda g: np.split(g, bounds, axis=0),
    )


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    _require(len(parts) > 0, "concat_cols needs at least one tensor")
    _require(all(p.ndim == 2 for p in parts), "concat_cols needs 2-D tensors")
    rows = {p.shape[0] for p in parts}
    _require(len(rows) == 1, f"concat_cols row counts differ: {sorted(rows)}")
    bounds = np.cumsum([p.shape[1] for p in parts])[:-1]
    return record(
        "concat_cols",
        np.concatenate([p.data for p in parts], axis=1),
        tuple(parts),
        lambda g: np.split(g, bounds, axis=1),
    )


def take_rows(x: Tensor, index: Sequence[int]) -> Tensor:
    idx = np.asarray(index, dtype=np.intp)
    _require(idx.ndim == 1 and (idx.size == 0 or (idx.min() >= 0 and idx.max() < x.shape[0])), "row index out of range")

    def grad(g):
        full = np.zeros_like(x.data)
        np.add.at(full, idx, g)
        return (full,)

    return record("take_rows", x.data[idx].copy(), (x,), grad)


def scatter_rows(x: Tensor, index: Sequence[int], n_rows: int) -> Tensor:
    """Place the rows of ``x`` at distinct ``index`` positions of an n_rows zero matrix."""
    idx = np.asarray(index, dtype=np.intp)
    _require(idx.shape == (x.shape[0],), f"{idx.shape[0] if idx.ndim else 0} indices for {x.shape[0]} rows")
    _require(len(set(idx.tolist())) == idx.size, "scatter_rows indices must be distinct")
    out = np.zeros((n_rows,) + x.shape[1:], dtype=x.dtype)
    out[idx] = x.data
    return record("scatter_rows", out, (x,), lambda g: (g[idx],))


def split_heads(x: Tensor, heads: int) -> Tensor:
    """m×d → heads×m×(d/heads)."""
    m, d = x.shape
    _require(d % heads == 0, f"width {d} is not divisible by {heads} heads")
    out = x.data.reshape(m, heads, d // heads).transpose(1, 0, 2).copy()
    return record("split_heads", out, (x,), lambda g: (g.transpose(1, 0, 2).reshape(m, d),))


def merge_heads(x: Tensor) -> Tensor:
    """heads×m×k → m×(heads·k)."""
    h, m, k = x.shape
    out = x.data.transpose(1, 0, 2).reshape(m, h * k)
    return record("merge_heads", out, (x,), lambda g: (g.reshape(m, h, k).transpose(1, 0, 2),))


# --- reductions and losses --------------------------------------------------


def mean_rows(x: Tensor) -> Tensor:
    """m×n → 1×n."""
    _require(x.ndim == 2 and x.shape[0] > 0, f"mean_rows needs a non-empty 2-D tensor, got {x.shape}")
    m = x.shape[0]
    return record(
        "mean_rows",
        x.data.mean(axis=0, keepdims=True),
        (x,),
        lambda g: (np.broadcast_to(g / m, x.shape).copy(),),
    )


def sum_rows(x: Tensor) -> Tensor:
    """m×n → 1×n."""
    _require(x.ndim == 2, f"sum_rows needs a 2-D tensor, got {x.shape}")
    return record(
        "sum_rows",
        x.data.sum(axis=0, keepdims=True),
        (x,),
        lambda g: (np.broadcast_to(g, x.shape).copy(),),
    )


def sum_all(x: Tensor) -> Tensor:
    return record("sum_all", np.asarray(x.data.sum(), dtype=x.dtype), (x,), lambda g: (np.full(x.shape, g, dtype=x.dtype),))


def bce_with_logits(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Mean binary cross-entropy from raw logits."""
    Z = logits.data.reshape(-1)
    y = np.asarray(targets, dtype=logits.dtype).reshape(-1)
    _require(Z.shape == y.shape, f"{Z.size} logits for {y.size} targets")
    count = Z.size
    losses = np.maximum(Z, 0) - Z * y + np.log1p(np.exp(-np.abs(Z)))
    probs = expit(Z)

    def grad(g):
        return (((probs - y) * (g / count)).reshape(logits.shape).astype(logits.dtype),)

    return record("bce_with_logits", np.asarray(losses.mean(), dtype=logits.dtype), (logits,), grad)
