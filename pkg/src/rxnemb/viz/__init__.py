"""Heatmaps, scatter plots and attention maps as SVG."""

from ..encoder.model import AttentionBundle
from .attention import AtomIntensities, aggregate_pool_attention, aggregate_transformer_attention
from .colors import ColorStop, Colormap, attention_colormap, diverging, diverging_colormap, red_scale, to_hex
from .svg import Rendering, render_attention_svg, render_heatmap_svg, render_scatter_svg, write_rendering

__all__ = [
    "AtomIntensities",
    "AttentionBundle",
    "ColorStop",
    "Colormap",
    "Rendering",
    "aggregate_pool_attention",
    "aggregate_transformer_attention",
    "attention_colormap",
    "diverging",
    "diverging_colormap",
    "red_scale",
    "render_attention_svg",
    "render_heatmap_svg",
    "render_scatter_svg",
    "to_hex",
    "write_rendering",
]
