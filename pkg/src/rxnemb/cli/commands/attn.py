"""Attention-map command for RXNEmb CLI."""

from pathlib import Path

import click
from rich.panel import Panel

from ...chem import parse_reaction, write_smiles
from ...encoder import SIDES, classify_reaction, embed_reaction, load_checkpoint
from ...utils.files import write_json
from ...viz import aggregate_pool_attention, aggregate_transformer_attention, render_attention_svg, write_rendering
from ..common import finish_run, handle_errors, output_dir, resolve_config
from ..display import console, display_outputs


@click.command(name="attn")
@click.argument("checkpoint", type=click.Path(dir_okay=False))
@click.argument("smiles")
@click.option("--id", "rxn_id", default="query", show_default=True, help="Identifier recorded in the outputs")
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
@handle_errors
def attn(ctx, checkpoint, smiles, rxn_id, out):
    """Atom-level attention map of a single reaction.

    Writes attention.json (pooling weights per molecule and the averaged
    Transformer attention per side) and attention_map.svg.

    Examples:
        rxnemb attn run1/model.ckpt "CC(=O)Cl.OCC>>CC(=O)OCC"
    """
    manager = resolve_config(ctx)
    config = manager.load()
    out_dir = output_dir(config, out)

    model = load_checkpoint(checkpoint)
    rxn = parse_reaction(smiles, rxn_id)
    _, bundle = embed_reaction(model, rxn)
    pooled = aggregate_pool_attention(bundle)
    p_real = classify_reaction(model, rxn)

    payload = {
        "reaction": rxn_id,
        "rxn_smiles": smiles,
        "p_real": p_real,
        "pooling": {
            side: [
                {
                    "molecule": item.molecule,
                    "smiles": write_smiles(graph),
                    "symbols": [atom.symbol for atom in graph.atoms],
                    "weights": item.raw.tolist(),
                    "scaled": item.scaled.tolist(),
                }
                for item, graph in zip(pooled[side], components)
            ]
            for side, components in rxn.sides()
        },
        "transformer": {side: aggregate_transformer_attention(bundle, side).tolist() for side in SIDES},
    }
    write_json(out_dir / "attention.json", payload)
    rendering = render_attention_svg(rxn, {side: [item.scaled for item in pooled[side]] for side in SIDES}, config.viz)
    write_rendering(out_dir / "attention_map.svg", rendering)

    outputs = ["attention.json", "attention_map.svg", "attention_map.json"]
    finish_run(out_dir, "attn", manager, [Path(checkpoint)], outputs)
    console.print(Panel(f"p(real) = {p_real:.4f}", title=rxn_id))
    display_outputs(out_dir, outputs)
