"""Embed command for RXNEmb CLI."""

from pathlib import Path

import click
import structlog

from ...chem import write_reaction_smiles
from ...core.errors import DataError, TooManyComponents
from ...encoder import embed_reactions, load_checkpoint, prepare_reaction
from ...pretrain import parse_records
from ...utils.files import EmbeddingSet, read_jsonl, write_embeddings
from ..common import finish_run, handle_errors, output_dir, resolve_config
from ..display import display_embedding, display_outputs

logger = structlog.get_logger()

EMBEDDINGS_FILE = "embeddings.bin"


@click.command(name="embed")
@click.argument("checkpoint", type=click.Path(dir_okay=False))
@click.argument("reactions", type=click.Path(dir_okay=False))
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory")
@click.option("--batch-size", type=click.IntRange(min=1), default=64, show_default=True)
@click.pass_context
@handle_errors
def embed(ctx, checkpoint, reactions, out, batch_size):
    """Compute RXNEmb vectors for every reaction in a JSON-lines file.

    Each line needs an ``rxn_smiles`` field; ``id`` and ``label`` are
    optional. Reactions that fail to parse are logged and skipped.
    """
    manager = resolve_config(ctx)
    config = manager.load()
    out_dir = output_dir(config, out)

    model = load_checkpoint(checkpoint)
    parsed, skipped = parse_records(read_jsonl(reactions), source=reactions)
    kept = []
    for rxn, record in parsed:
        try:
            prepare_reaction(rxn, model.config)
        except TooManyComponents as e:
            logger.warning("reaction_skipped", source=reactions, reaction=rxn.id, reason=str(e))
            skipped += 1
            continue
        kept.append((rxn, record))
    if not kept:
        raise DataError(f"no reaction in {reactions} could be embedded ({skipped} skipped)")

    vectors = embed_reactions(model, [rxn for rxn, _ in kept], batch_size=batch_size, workers=config.threads)
    embeddings = EmbeddingSet(
        ids=[rxn.id for rxn, _ in kept],
        vectors=vectors,
        skipped=skipped,
        rxn_smiles=[record.get("rxn_smiles") or write_reaction_smiles(rxn) for rxn, record in kept],
        labels=[rxn.class_label for rxn, _ in kept],
    )
    write_embeddings(out_dir / EMBEDDINGS_FILE, embeddings)
    finish_run(out_dir, "embed", manager, [Path(checkpoint), Path(reactions)], [EMBEDDINGS_FILE])

    display_embedding(embeddings.count, skipped, embeddings.emb_dim)
    display_outputs(out_dir, [EMBEDDINGS_FILE])
