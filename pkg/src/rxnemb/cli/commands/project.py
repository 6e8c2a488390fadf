"""Project command for RXNEmb CLI."""

from pathlib import Path
from typing import List, Tuple

import click
import numpy as np

from ...core.errors import ConfigError, LengthMismatch
from ...project import project_embeddings, write_layout_csv
from ...utils.files import read_embeddings
from ...viz import render_scatter_svg, write_rendering
from ..common import finish_run, handle_errors, output_dir, resolve_config
from ..display import display_outputs


def _split_tagged(item: str) -> Tuple[str, Path]:
    """``TAG=path`` or a bare path tagged with its file stem."""
    tag, sep, path = item.partition("=")
    if sep and tag and path:
        return tag, Path(path)
    path = Path(item)
    return path.stem, path


@click.command(name="project")
@click.argument("embeddings", nargs=-1, required=True)
@click.option("--n-neighbors", type=click.IntRange(min=2), help="Neighbourhood size (default 15)")
@click.option("--min-dist", type=float, help="Minimum 2-D separation (default 0.1)")
@click.option("--seed", type=int, help="Layout seed")
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
@handle_errors
def project(ctx, embeddings, n_neighbors, min_dist, seed, out):
    """Co-project one or more embedding files into two dimensions.

    Give each file as TAG=path to name its dataset in the plot; a bare path
    is tagged with its file name.

    Examples:
        rxnemb project uspto=run1/embeddings.bin ord=run2/embeddings.bin
    """
    manager = resolve_config(ctx, {"seed": seed, "projection": {"n_neighbors": n_neighbors, "min_dist": min_dist}})
    config = manager.load()
    out_dir = output_dir(config, out)

    datasets: List[str] = []
    inputs: List[Path] = []
    ids: List[str] = []
    tags: List[str] = []
    blocks = []
    for item in embeddings:
        tag, path = _split_tagged(item)
        if tag in datasets:
            raise ConfigError(f"dataset tag {tag!r} given twice")
        embs = read_embeddings(path)
        if blocks and embs.emb_dim != blocks[0].shape[1]:
            raise LengthMismatch(f"{path} has {embs.emb_dim}-dimensional embeddings, expected {blocks[0].shape[1]}")
        datasets.append(tag)
        inputs.append(path)
        ids.extend(embs.ids)
        tags.extend([tag] * embs.count)
        blocks.append(embs.vectors)

    layout = project_embeddings(np.vstack(blocks), config.projection, config.seed, config.threads)
    write_layout_csv(out_dir / "layout.csv", ids, layout, tags)
    write_rendering(out_dir / "scatter.svg", render_scatter_svg(layout.coords, tags, datasets, config.viz))

    outputs = ["layout.csv", "scatter.svg", "scatter.json"]
    finish_run(out_dir, "project", manager, inputs, outputs)
    display_outputs(out_dir, outputs)
