"""Byte-deterministic SVG renderers with JSON sidecars."""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape, quoteattr

import numpy as np
import structlog

from ..chem import Reaction
from ..cluster.distances import DistanceMatrix
from ..core.errors import ConfigError, CountMismatch, DataError, UnknownTag
from ..core.types import VizConfig
from ..utils.files import write_json
from .colors import attention_colormap, diverging_colormap

logger = structlog.get_logger()

FONT = "font-family=\"Helvetica,Arial,sans-serif\""
ATOM_RADIUS = 12
ATOM_PITCH = 32
SCATTER_SIZE = 480
SCATTER_MARGIN = 40


@dataclass
class Rendering:
    svg: bytes
    sidecar: Dict[str, Any]


def _document(width: int, height: int, body: List[str]) -> bytes:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>\n'
    )
    return (head + "\n".join(body) + "\n</svg>\n").encode("utf-8")


def _num(value: float) -> str:
    return f"{value:.2f}"


def render_heatmap_svg(
    dm: DistanceMatrix,
    order: Sequence[int],
    labels: Optional[Sequence[str]] = None,
    config: Optional[VizConfig] = None,
) -> Rendering:
    """Distance heatmap in ``order``; 0 maps to the near colour, the maximum to the far one."""
    config = config or VizConfig()
    n = dm.n
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise DataError(f"order is not a permutation of {n} items")
    labels = [str(i) for i in range(n)] if labels is None else [str(label) for label in labels]
    if len(labels) != n:
        raise DataError(f"{len(labels)} labels for {n} rows")

    cmap = diverging_colormap(config)
    values = dm.values[np.ix_(order, order)]
    top = float(values.max())
    scaled = values / top if top > 0 else np.zeros_like(values)

    cell = config.cell_size
    margin = 7 * max(len(label) for label in labels) + 8
    width = height = margin + n * cell + 4
    font = max(cell - 3, 6)
    body = []
    colors = []
    for r in range(n):
        row_colors = []
        for c in range(n):
            fill = cmap.hex(scaled[r, c])
            row_colors.append(fill)
            body.append(f'<rect x="{margin + c * cell}" y="{margin + r * cell}" width="{cell}" height="{cell}" fill="{fill}"/>')
        colors.append(row_colors)
    for i, index in enumerate(order):
        text = escape(labels[index])
        mid = margin + i * cell + cell / 2
        body.append(
            f'<text x="{margin - 3}" y="{_num(mid)}" {FONT} font-size="{font}" text-anchor="end" '
            f'dominant-baseline="middle">{text}</text>'
        )
        body.append(
            f'<text x="{_num(mid)}" y="{margin - 3}" {FONT} font-size="{font}" text-anchor="start" '
            f'transform="rotate(-90 {_num(mid)} {margin - 3})">{text}</text>'
        )

    sidecar = {
        "kind": "heatmap",
        "order": order,
        "labels": [labels[i] for i in order],
        "max_distance": round(top, 6),
        "values": [[round(float(v), 6) for v in row] for row in values],
        "colors": colors,
    }
    return Rendering(_document(width, height, body), sidecar)


def render_attention_svg(
    reaction: Reaction,
    intensities: Mapping[str, Sequence[Sequence[float]]],
    config: Optional[VizConfig] = None,
) -> Rendering:
    """One row of labelled atom circles per molecule, reactants above products."""
    config = config or VizConfig()
    cmap = attention_colormap(config)
    rows: List[Tuple[str, int, Any, np.ndarray]] = []
    for side, components in reaction.sides():
        given = intensities.get(side, [])
        if len(given) != len(components):
            raise CountMismatch(f"{len(given)} intensity rows for {len(components)} {side} molecules")
        for index, (graph, values) in enumerate(zip(components, given)):
            values = np.asarray(values, dtype=np.float64).reshape(-1)
            if values.size != graph.num_atoms:
                raise CountMismatch(
                    f"{side} molecule {index} has {graph.num_atoms} atoms but {values.size} intensities"
                )
            rows.append((side, index, graph, values))

    label_width = 40
    widest = max(graph.num_atoms for _, _, graph, _ in rows)
    width = label_width + widest * ATOM_PITCH + 8
    height = len(rows) * ATOM_PITCH + 8
    body = []
    sidecar_rows = []
    for r, (side, index, graph, values) in enumerate(rows):
        cy = 4 + r * ATOM_PITCH + ATOM_PITCH // 2
        tag = f"{'R' if side == 'reactant' else 'P'}{index + 1}"
        body.append(f'<text x="4" y="{cy}" {FONT} font-size="11" dominant-baseline="middle">{tag}</text>')
        atoms = []
        for position, (atom, value) in enumerate(zip(graph.atoms, values.tolist())):
            cx = label_width + position * ATOM_PITCH + ATOM_PITCH // 2
            fill = cmap.hex(value)
            ink = "#ffffff" if value > 0.6 else "#000000"
            body.append(f'<circle cx="{cx}" cy="{cy}" r="{ATOM_RADIUS}" fill="{fill}" stroke="#555555" stroke-width="0.5"/>')
            body.append(
                f'<text x="{cx}" y="{cy}" {FONT} font-size="10" fill="{ink}" text-anchor="middle" '
                f'dominant-baseline="middle">{escape(atom.symbol)}<tspan font-size="6" dy="4">{position}</tspan></text>'
            )
            atoms.append({"index": position, "symbol": atom.symbol, "intensity": round(value, 6), "fill": fill})
        sidecar_rows.append({"side": side, "molecule": index, "atoms": atoms})

    sidecar = {"kind": "attention", "reaction": reaction.id, "rows": sidecar_rows}
    return Rendering(_document(width, height, body), sidecar)


def render_scatter_svg(
    coords: np.ndarray,
    tags: Sequence[str],
    datasets: Optional[Sequence[str]] = None,
    config: Optional[VizConfig] = None,
) -> Rendering:
    """Scatter of a 2-D layout coloured by dataset, with a legend entry per dataset."""
    config = config or VizConfig()
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != 2 or len(coords) != len(tags):
        raise DataError(f"{len(tags)} tags for coordinates of shape {coords.shape}")
    if datasets is None:
        datasets = list(dict.fromkeys(tags))
    datasets = list(datasets)
    if len(datasets) > len(config.palette):
        raise ConfigError(f"{len(datasets)} datasets but only {len(config.palette)} palette colours")
    colour = {name: config.palette[i] for i, name in enumerate(datasets)}
    unknown = sorted(set(tags) - set(colour))
    if unknown:
        raise UnknownTag(f"tag {unknown[0]!r} is not a declared dataset")

    ranges = []
    for axis in range(2):
        lo, hi = (float(coords[:, axis].min()), float(coords[:, axis].max())) if len(coords) else (0.0, 1.0)
        span = hi - lo if hi > lo else 1.0
        ranges.append((lo - 0.05 * span, hi + 0.05 * span))
    (x0, x1), (y0, y1) = ranges
    plot = SCATTER_SIZE

    def sx(x: float) -> float:
        return SCATTER_MARGIN + (x - x0) / (x1 - x0) * plot

    def sy(y: float) -> float:
        return SCATTER_MARGIN + plot - (y - y0) / (y1 - y0) * plot

    legend_width = 12 + 7 * max((len(name) for name in datasets), default=0) + 24
    width = SCATTER_MARGIN * 2 + plot + legend_width
    height = SCATTER_MARGIN * 2 + plot
    body = [
        f'<rect x="{SCATTER_MARGIN}" y="{SCATTER_MARGIN}" width="{plot}" height="{plot}" '
        'fill="none" stroke="#333333" stroke-width="1"/>'
    ]
    for (x, y), tag in zip(coords.tolist(), tags):
        body.append(f'<circle cx="{_num(sx(x))}" cy="{_num(sy(y))}" r="2" fill="{colour[tag]}" fill-opacity="0.7"/>')

    legend_x = SCATTER_MARGIN * 2 + plot
    for i, name in enumerate(datasets):
        y = SCATTER_MARGIN + 8 + i * 18
        body.append(f'<circle cx="{legend_x}" cy="{y}" r="5" fill="{colour[name]}"/>')
        body.append(
            f'<text x="{legend_x + 10}" y="{y}" {FONT} font-size="11" dominant-baseline="middle" '
            f'data-dataset={quoteattr(name)}>{escape(name)}</text>'
        )

    counts = {name: 0 for name in datasets}
    for tag in tags:
        counts[tag] += 1
    sidecar = {
        "kind": "scatter",
        "points": len(coords),
        "datasets": counts,
        "colors": colour,
        "x_range": [round(x0, 6), round(x1, 6)],
        "y_range": [round(y0, 6), round(y1, 6)],
    }
    return Rendering(_document(width, height, body), sidecar)


def write_rendering(path: Union[str, Path], rendering: Rendering) -> Tuple[Path, Path]:
    """Write ``<stem>.svg`` and its ``<stem>.json`` sidecar."""
    path = Path(path)
    svg_path = path.with_suffix(".svg")
    svg_path.parent.mkdir(parents=True, exist_ok=True)
    svg_path.write_bytes(rendering.svg)
    json_path = write_json(path.with_suffix(".json"), rendering.sidecar)
    logger.debug("rendering_written", path=str(svg_path), kind=rendering.sidecar.get("kind"))
    return svg_path, json_path
