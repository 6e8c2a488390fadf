"""Cluster command for RXNEmb CLI."""

from pathlib import Path

import click

from ...cluster import average_linkage_tree, group_by_labels, optimal_leaf_order, reclassify
from ...core.types import GroupDistance, Metric
from ...utils.files import read_embeddings, write_csv, write_json
from ...viz import render_heatmap_svg, write_rendering
from ..common import finish_run, handle_errors, output_dir, resolve_config
from ..display import display_clusters, display_outputs

ASSIGNMENT_COLUMNS = ("reaction_id", "cluster_id", "is_centroid")


@click.command(name="cluster")
@click.argument("embeddings", type=click.Path(dir_okay=False))
@click.option("--k", type=click.IntRange(min=2), help="Number of clusters (default 50)")
@click.option("--metric", type=click.Choice([m.value for m in Metric]))
@click.option("--group-distance", type=click.Choice([g.value for g in GroupDistance]))
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
@handle_errors
def cluster(ctx, embeddings, k, metric, group_distance, out):
    """Reclassify embedded reactions into k data-driven clusters.

    Writes assignments.csv, clusters.json and a heatmap of inter-cluster
    distances in optimal leaf order.
    """
    manager = resolve_config(ctx, {"cluster": {"k": k, "metric": metric, "group_distance": group_distance}})
    config = manager.load()
    out_dir = output_dir(config, out)

    embs = read_embeddings(embeddings)
    result = reclassify(embs.vectors, config.cluster, embs.labels if embs.has_labels else None)
    assignment = result.assignment
    sizes = assignment.sizes
    centroids = set(assignment.centroid_indices)

    write_csv(
        out_dir / "assignments.csv",
        ASSIGNMENT_COLUMNS,
        (
            (rxn_id, int(label), int(i in centroids))
            for i, (rxn_id, label) in enumerate(zip(embs.ids, assignment.labels.tolist()))
        ),
    )
    report = []
    for c in range(assignment.k):
        centroid = int(assignment.centroid_indices[c])
        row = {
            "cluster_id": c,
            "size": sizes[c],
            "centroid_id": embs.ids[centroid],
            "centroid_rxn_smiles": embs.rxn_smiles[centroid],
        }
        if result.label_counts is not None:
            row["label_counts"] = result.label_counts[c]
        report.append(row)
    write_json(out_dir / "clusters.json", {"order": result.order, "order_cost": result.order_cost, "clusters": report})

    outputs = ["assignments.csv", "clusters.json", "heatmap.svg", "heatmap.json"]
    heatmap = render_heatmap_svg(
        result.group_distances, result.order, [f"C{c}" for c in range(assignment.k)], config.viz
    )
    write_rendering(out_dir / "heatmap.svg", heatmap)

    if len({label for label in embs.labels if label is not None}) >= 2:
        names, _, class_dm = group_by_labels(embs.vectors, embs.labels, config.cluster.metric)
        class_order = optimal_leaf_order(average_linkage_tree(class_dm), class_dm)
        write_rendering(out_dir / "classes_heatmap.svg", render_heatmap_svg(class_dm, class_order, names, config.viz))
        outputs += ["classes_heatmap.svg", "classes_heatmap.json"]

    finish_run(out_dir, "cluster", manager, [Path(embeddings)], outputs)
    display_clusters(report)
    display_outputs(out_dir, outputs)
