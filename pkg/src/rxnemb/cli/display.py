"""Rich summaries printed by the CLI commands."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import humanize
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


def display_outputs(out: Path, names: Sequence[str]) -> None:
    """Table of written artifacts with their sizes."""
    table = Table(title=f"Outputs in {out}", box=box.ROUNDED, header_style="bold magenta")
    table.add_column("File", style="cyan")
    table.add_column("Size", style="green", justify="right")
    for name in names:
        path = out / name
        size = humanize.naturalsize(path.stat().st_size) if path.exists() else "-"
        table.add_row(name, size)
    console.print(table)


def display_training(history: Sequence, split_sizes: Dict[str, int], best_epoch: int, test_metrics: Dict) -> None:
    table = Table(title="Pre-training", box=box.SIMPLE_HEAVY, header_style="bold cyan")
    for column in ("Epoch", "Train loss", "Val loss", "Val acc"):
        table.add_column(column, justify="right")
    for record in history:
        epoch, train_loss, val_loss, val_acc = record.row()
        style = "bold green" if record.epoch == best_epoch else None
        table.add_row(epoch, train_loss, val_loss or "-", val_acc or "-", style=style)
    console.print(table)

    lines = [f"Split: {split_sizes['train']} train / {split_sizes['val']} val / {split_sizes['test']} test"]
    lines.append(f"Best epoch: {best_epoch}")
    if test_metrics:
        auroc = test_metrics.get("auroc")
        lines.append(
            f"Held-out accuracy: {test_metrics['accuracy']:.3f}"
            + (f", AUROC: {auroc:.3f}" if auroc is not None else "")
        )
    console.print(Panel("\n".join(lines), title="Summary", box=box.ROUNDED))


def display_embedding(count: int, skipped: int, emb_dim: int) -> None:
    style = "yellow" if skipped else "green"
    console.print(
        Panel(
            f"Embedded [bold]{count}[/bold] reactions ({emb_dim} dimensions)\n"
            f"[{style}]Skipped: {skipped}[/{style}]",
            title="Embedding",
            box=box.ROUNDED,
        )
    )


def display_clusters(report: List[Dict], limit: int = 20) -> None:
    table = Table(title="Clusters", box=box.ROUNDED, header_style="bold magenta")
    table.add_column("Cluster", justify="right", style="cyan")
    table.add_column("Reactions", justify="right")
    table.add_column("Centroid SMILES", style="dim", overflow="fold")
    table.add_column("Top label", style="green")
    for row in report[:limit]:
        counts = row.get("label_counts") or {}
        top = next(iter(counts), "")
        table.add_row(str(row["cluster_id"]), str(row["size"]), row["centroid_rxn_smiles"], top)
    if len(report) > limit:
        table.caption = f"{len(report) - limit} more clusters in clusters.json"
    console.print(table)


def display_search(results: List[Tuple[str, float, Optional[str]]]) -> None:
    table = Table(title="Nearest reactions", box=box.ROUNDED, header_style="bold magenta")
    table.add_column("#", justify="right")
    table.add_column("Reaction", style="cyan")
    table.add_column("Distance", justify="right")
    table.add_column("Label", style="green")
    for rank, (rxn_id, distance, label) in enumerate(results, 1):
        table.add_row(str(rank), rxn_id, f"{distance:.4f}", label or "")
    console.print(table)
