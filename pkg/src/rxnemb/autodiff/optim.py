"""Adam optimizer over named parameter arrays."""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np

from ..core.errors import ShapeMismatch


@dataclass(frozen=True)
class AdamState:
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update. Inputs are not modified.

    Parameters without a gradient entry are treated as having zero gradient.
    """
    step = state.step + 1
    new_params: Dict[str, np.ndarray] = {}
    new_m: Dict[str, np.ndarray] = {}
    new_v: Dict[str, np.ndarray] = {}
    correction1 = 1.0 - beta1**step
    correction2 = 1.0 - beta2**step

    for name, value in params.items():
        dtype = value.dtype
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(value)
        elif grad.shape != value.shape:
            raise ShapeMismatch(f"gradient for {name} has shape {grad.shape}, parameter {value.shape}")

        m_prev = state.m.get(name)
        v_prev = state.v.get(name)
        if m_prev is None:
            m_prev = np.zeros_like(value)
            v_prev = np.zeros_like(value)
        elif m_prev.shape != value.shape or v_prev.shape != value.shape:
            raise ShapeMismatch(f"optimizer state for {name} does not match shape {value.shape}")

        m = (beta1 * m_prev + (1.0 - beta1) * grad).astype(dtype)
        v = (beta2 * v_prev + (1.0 - beta2) * grad * grad).astype(dtype)
        m_hat = m / correction1
        v_hat = v / correction2
        new_params[name] = (value - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(dtype)
        new_m[name] = m
        new_v[name] = v

    return new_params, AdamState(step, new_m, new_v)
