"""CLI entry point for RXNEmb."""

from pathlib import Path

import click

from .. import __version__
from .commands import attn, cluster, config as config_cmd, embed, pretrain, project, search


@click.group()
@click.option("--config", "-c", "config_path", type=click.Path(dir_okay=False), help="Configuration file (YAML or JSON)")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads (overrides RXNEMB_THREADS)")
@click.version_option(version=__version__, prog_name="rxnemb")
@click.pass_context
def cli(ctx, config_path, log_level, threads):
    """RXNEmb - reaction embeddings, reclassification and attention maps.

    Every command reads its inputs from files, writes its outputs plus
    manifest.json and config.resolved.yaml to an output directory, and is
    deterministic for a given seed.
    """
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = Path(config_path) if config_path else None
    ctx.obj["overrides"] = {"log_level": log_level.upper() if log_level else None, "threads": threads}


cli.add_command(pretrain.pretrain)
cli.add_command(embed.embed)
cli.add_command(cluster.cluster)
cli.add_command(project.project)
cli.add_command(attn.attn)
cli.add_command(search.search)
cli.add_command(config_cmd.config)


if __name__ == "__main__":
    cli()
