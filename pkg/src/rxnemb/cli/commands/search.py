"""Analogous-reaction search command for RXNEmb CLI."""

from pathlib import Path

import click

from ...chem import parse_reaction
from ...cluster import retrieve_similar
from ...core.errors import ConfigError, DataError
from ...core.types import Metric
from ...encoder import embed_reaction, load_checkpoint
from ...utils.files import read_embeddings, write_json
from ..common import finish_run, handle_errors, output_dir, resolve_config
from ..display import display_outputs, display_search


@click.command(name="search")
@click.argument("embeddings", type=click.Path(dir_okay=False))
@click.option("--id", "rxn_id", help="Query with a reaction already in the embedding file")
@click.option("--checkpoint", type=click.Path(dir_okay=False), help="Checkpoint used to embed --smiles")
@click.option("--smiles", help="Query reaction SMILES")
@click.option("--top", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--metric", type=click.Choice([m.value for m in Metric]))
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
@handle_errors
def search(ctx, embeddings, rxn_id, checkpoint, smiles, top, metric, out):
    """Find the reactions closest to a query in embedding space.

    Examples:
        rxnemb search run1/embeddings.bin --id US0001 --top 5
        rxnemb search run1/embeddings.bin --checkpoint run1/model.ckpt --smiles "CBr.O>>CO"
    """
    if (rxn_id is None) == (smiles is None):
        raise ConfigError("give exactly one of --id or --smiles")
    if smiles is not None and checkpoint is None:
        raise ConfigError("--smiles needs --checkpoint")

    manager = resolve_config(ctx, {"cluster": {"metric": metric}})
    config = manager.load()
    out_dir = output_dir(config, out)
    embs = read_embeddings(embeddings)
    inputs = [Path(embeddings)]

    exclude = None
    if rxn_id is not None:
        if rxn_id not in embs.ids:
            raise DataError(f"reaction {rxn_id!r} is not in {embeddings}")
        exclude = embs.ids.index(rxn_id)
        query = embs.vectors[exclude]
        query_name = rxn_id
    else:
        model = load_checkpoint(checkpoint)
        query, _ = embed_reaction(model, parse_reaction(smiles, "query"))
        query_name = smiles
        inputs.append(Path(checkpoint))

    hits = retrieve_similar(query, embs.vectors, top, config.cluster.metric, exclude=exclude)
    results = [(embs.ids[i], distance, embs.labels[i]) for i, distance in hits]
    write_json(
        out_dir / "search.json",
        {
            "query": query_name,
            "metric": config.cluster.metric.value,
            "results": [
                {"reaction_id": embs.ids[i], "rxn_smiles": embs.rxn_smiles[i], "distance": distance, "label": embs.labels[i]}
                for i, distance in hits
            ],
        },
    )
    finish_run(out_dir, "search", manager, inputs, ["search.json"])
    display_search(results)
    display_outputs(out_dir, ["search.json"])
