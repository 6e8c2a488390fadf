"""Minimal dense tensors with reverse-mode gradients."""

from . import ops
from .gradcheck import gradient_check, relative_error
from .optim import AdamState, adam_step
from .tensor import DEFAULT_DTYPE, Gradients, Tape, Tensor, active_tape, backward

__all__ = [
    "AdamState",
    "DEFAULT_DTYPE",
    "Gradients",
    "Tape",
    "Tensor",
    "active_tape",
    "adam_step",
    "backward",
    "gradient_check",
    "ops",
    "relative_error",
]
