"""Pre-train command for RXNEmb CLI."""

from pathlib import Path

import click

from ...core.errors import ConfigError
from ...encoder import save_checkpoint
from ...pretrain import (
    Trainer,
    make_fictitious_corpus,
    read_corpus_jsonl,
    synth_templates,
    write_corpus_jsonl,
    write_history,
)
from ...utils.files import write_json
from ..common import finish_run, handle_errors, output_dir, resolve_config
from ..display import display_outputs, display_training

JK_CHOICES = {"concat": "concat_project", "last": "last"}


@click.command(name="pretrain")
@click.option("--corpus", type=click.Path(dir_okay=False), help="Reaction JSONL (fictitious entries are generated if absent)")
@click.option("--synth", type=click.IntRange(min=2), help="Generate this many template reactions instead of reading a corpus")
@click.option("--seed", type=int, help="Seed for corpus generation, splitting and initialization")
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory")
@click.option("--epochs", type=click.IntRange(min=1))
@click.option("--batch-size", type=click.IntRange(min=1))
@click.option("--lr", type=float)
@click.option("--jk", type=click.Choice(sorted(JK_CHOICES)), help="Jumping Knowledge mode")
@click.pass_context
@handle_errors
def pretrain(ctx, corpus, synth, seed, out, epochs, batch_size, lr, jk):
    """Train the encoder to tell real reactions from fictitious ones.

    Examples:
        rxnemb pretrain --synth 1000 --seed 7 --out run1/
        rxnemb pretrain --corpus reactions.jsonl --epochs 10
    """
    manager = resolve_config(
        ctx,
        {
            "seed": seed,
            "corpus": {"corpus": corpus, "synth": synth},
            "train": {"epochs": epochs, "batch_size": batch_size, "lr": lr},
            "encoder": {"jk_mode": JK_CHOICES.get(jk)},
        },
    )
    config = manager.load()
    out_dir = output_dir(config, out)
    inputs = []

    # a flag beats the other source set in the config file
    use_synth = config.corpus.synth is not None and (synth is not None or corpus is None)
    if use_synth:
        reactions = synth_templates(config.corpus.synth, config.seed)
        labeled = make_fictitious_corpus(reactions, config.seed, config.corpus.max_resample, config.threads)
    elif config.corpus.corpus is not None:
        inputs.append(Path(config.corpus.corpus))
        labeled = read_corpus_jsonl(config.corpus.corpus, config.seed, config.corpus.max_resample, config.threads)
    else:
        raise ConfigError("give --corpus or --synth (or set corpus.corpus / corpus.synth in the config)")

    train_config = config.train.model_copy(update={"seed": config.seed})
    result = Trainer(config.encoder, train_config, workers=config.threads).fit(labeled)

    outputs = ["corpus.jsonl", "model.ckpt", "history.csv", "metrics.json"]
    write_corpus_jsonl(out_dir / "corpus.jsonl", labeled)
    save_checkpoint(result.checkpoint, out_dir / "model.ckpt")
    write_history(out_dir / "history.csv", result.history)
    write_json(
        out_dir / "metrics.json",
        {
            "best_epoch": result.best_epoch,
            "split_sizes": result.split_sizes,
            "test_metrics": result.test_metrics,
            "skipped": result.skipped,
        },
    )
    finish_run(out_dir, "pretrain", manager, inputs, outputs)

    display_training(result.history, result.split_sizes, result.best_epoch, result.test_metrics)
    display_outputs(out_dir, outputs)
