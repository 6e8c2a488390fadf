"""Configuration command for RXNEmb CLI."""

import click

from ..common import handle_errors, resolve_config


@click.group(name="config")
def config():
    """Inspect the resolved configuration."""


@config.command(name="show")
@click.option("--format", "fmt", type=click.Choice(["yaml", "json"]), default="yaml", show_default=True)
@click.pass_context
@handle_errors
def show(ctx, fmt):
    """Print the configuration after file, environment and flag overrides."""
    manager = resolve_config(ctx)
    click.echo(manager.dump(fmt), nl=False)
