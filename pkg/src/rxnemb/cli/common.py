"""Shared plumbing for the CLI commands."""

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

import click
import structlog
from rich.console import Console

from .. import __version__
from ..core.config import ConfigManager, load_config
from ..core.errors import ConfigError, DataError, RxnEmbError
from ..core.types import PipelineConfig
from ..utils.files import write_manifest

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

RESOLVED_CONFIG = "config.resolved.yaml"

error_console = Console(stderr=True)


def configure_logging(level: str = "INFO") -> None:
    """structlog over stdlib logging, written to stderr so stdout stays clean."""
    logging.basicConfig(stream=sys.stderr, format="%(message)s", level=level.upper(), force=True)
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


def handle_errors(fn: Callable) -> Callable:
    """Turn library errors into a one-line message and an exit code."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as e:
            error_console.print(f"[red]configuration error:[/red] {e}", highlight=False)
            sys.exit(EXIT_CONFIG)
        except DataError as e:
            error_console.print(f"[red]data error:[/red] {e}", highlight=False)
            sys.exit(EXIT_DATA)
        except RxnEmbError as e:
            error_console.print(f"[red]error:[/red] {e}", highlight=False)
            sys.exit(EXIT_FAILURE)

    return wrapper


def _merge(base: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in updates.items():
        if value is None:
            continue
        if isinstance(value, dict):
            nested = _merge(merged.get(key) or {}, value)
            if nested:
                merged[key] = nested
        else:
            merged[key] = value
    return merged


def resolve_config(ctx: click.Context, overrides: Optional[Dict[str, Any]] = None) -> ConfigManager:
    """Config file, then environment, then group flags, then command flags."""
    obj = ctx.find_root().obj or {}
    updates = _merge(obj.get("overrides", {}), overrides or {})
    manager = load_config(obj.get("config_path"), updates)
    configure_logging(manager.load().log_level)
    return manager


def output_dir(config: PipelineConfig, out: Optional[str]) -> Path:
    path = Path(out) if out else config.output_dir
    path.mkdir(parents=True, exist_ok=True)
    return path


def finish_run(
    out: Path,
    command: str,
    manager: ConfigManager,
    inputs: Sequence[Path] = (),
    outputs: Sequence[str] = (),
) -> None:
    """Write the resolved configuration and the run manifest next to the outputs."""
    manager.save(out / RESOLVED_CONFIG)
    config = manager.load()
    write_manifest(
        out,
        command=command,
        version=__version__,
        inputs=[p for p in inputs if p.is_file()],
        seed=config.seed,
        config=config.model_dump(mode="json"),
        outputs=list(outputs) + [RESOLVED_CONFIG],
    )
