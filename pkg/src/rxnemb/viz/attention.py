"""Aggregation of recorded attention into per-atom and per-molecule views."""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from ..core.errors import DataError
from ..encoder.model import SIDES, AttentionBundle

POOL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class AtomIntensities:
    """Pooling weights of one molecule, raw and rescaled so the top atom is 1."""

    side: str
    molecule: int
    raw: np.ndarray
    scaled: np.ndarray


def aggregate_pool_attention(bundle: AttentionBundle) -> Dict[str, List[AtomIntensities]]:
    out: Dict[str, List[AtomIntensities]] = {}
    for side in SIDES:
        molecules = []
        for index, weights in enumerate(bundle.pool_weights.get(side, [])):
            raw = np.asarray(weights, dtype=np.float64)
            if raw.size == 0 or abs(raw.sum() - 1.0) > POOL_TOLERANCE:
                raise DataError(f"pooling weights of {side} molecule {index} sum to {raw.sum():.8f}, not 1")
            molecules.append(AtomIntensities(side, index, raw, raw / raw.max()))
        out[side] = molecules
    return out


def aggregate_transformer_attention(bundle: AttentionBundle, side: str) -> np.ndarray:
    """Mean over layers and heads between real molecules, rows renormalized."""
    layers = bundle.layer_attention.get(side) or []
    if not layers:
        raise DataError(f"no Transformer attention recorded for the {side} side")
    real = np.flatnonzero(bundle.masks[side])
    stacked = np.stack([np.asarray(layer, dtype=np.float64)[:, real[:, None], real[None, :]] for layer in layers])
    mean = stacked.mean(axis=(0, 1))
    return mean / mean.sum(axis=1, keepdims=True)
