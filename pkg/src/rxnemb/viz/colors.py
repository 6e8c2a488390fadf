"""Piecewise-linear colormaps."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.types import VizConfig

RGB = Tuple[int, int, int]


@dataclass(frozen=True)
class ColorStop:
    value: float
    rgb: RGB


class Colormap:
    """Linear interpolation between stops; endpoints are reproduced exactly."""

    def __init__(self, stops: Sequence[ColorStop]):
        stops = sorted(stops, key=lambda s: s.value)
        if len(stops) < 2 or stops[0].value != 0.0 or stops[-1].value != 1.0:
            raise ValueError("a colormap needs stops at 0.0 and 1.0")
        self.stops = tuple(stops)
        self._positions = np.array([s.value for s in stops])
        self._channels = np.array([s.rgb for s in stops], dtype=np.float64).T

    def __call__(self, value: float) -> RGB:
        v = min(max(float(value), 0.0), 1.0)
        return tuple(int(round(float(np.interp(v, self._positions, channel)))) for channel in self._channels)

    def hex(self, value: float) -> str:
        return to_hex(self(value))


def to_hex(rgb: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def attention_colormap(config: Optional[VizConfig] = None) -> Colormap:
    config = config or VizConfig()
    return Colormap([ColorStop(0.0, tuple(config.attention_low)), ColorStop(1.0, tuple(config.attention_high))])


def diverging_colormap(config: Optional[VizConfig] = None) -> Colormap:
    config = config or VizConfig()
    return Colormap(
        [
            ColorStop(0.0, tuple(config.heatmap_near)),
            ColorStop(0.5, tuple(config.heatmap_mid)),
            ColorStop(1.0, tuple(config.heatmap_far)),
        ]
    )


_RED_SCALE = attention_colormap()
_DIVERGING = diverging_colormap()


def red_scale(value: float) -> RGB:
    """Light pink at 0, deep red at 1."""
    return _RED_SCALE(value)


def diverging(value: float) -> RGB:
    """Blue at 0, near-white at 0.5, red at 1."""
    return _DIVERGING(value)
