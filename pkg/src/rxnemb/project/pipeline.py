"""Embedding-to-2-D projection pipeline."""

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import structlog

from ..cluster.distances import as_matrix
from ..core.errors import ConfigError, DataError, KTooLarge
from ..core.types import ProjectionConfig
from ..utils.files import write_csv
from .graph import fuzzy_graph, knn_graph, smooth_knn
from .layout import Layout, fit_ab, layout_sgd

logger = structlog.get_logger()

LAYOUT_COLUMNS = ("reaction_id", "x", "y", "dataset_tag")


def standardize(X: np.ndarray) -> np.ndarray:
    """Zero mean and unit variance per dimension; constant dimensions become 0."""
    X = as_matrix(X)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    centred = X - mean
    safe = np.where(std > 0, std, 1.0)
    return np.where(std > 0, centred / safe, 0.0)


def project_embeddings(
    embs,
    config: Optional[ProjectionConfig] = None,
    seed: int = 0,
    workers: int = 1,
) -> Layout:
    config = config or ProjectionConfig()
    log = logger.bind(component="Projector")
    X = as_matrix(embs)
    n = len(X)
    if config.n_neighbors >= n:
        raise KTooLarge(f"n_neighbors={config.n_neighbors} needs at least {config.n_neighbors + 1} points, got {n}")
    if n > config.max_points:
        raise ConfigError(f"{n} points exceeds max_points={config.max_points}")
    if config.standardize:
        X = standardize(X)

    k = config.n_neighbors
    knn = knn_graph(X, k, workers)
    rho, sigma = smooth_knn(knn.distances, k)
    graph = fuzzy_graph(knn, rho, sigma)
    a, b = fit_ab(config.min_dist, config.spread)
    layout = layout_sgd(
        graph,
        n_epochs=config.n_epochs,
        seed=seed,
        a=a,
        b=b,
        negative_sample_rate=config.negative_sample_rate,
        learning_rate=config.learning_rate,
        init_scale=config.init_scale,
        batch_size=config.batch_size,
    )
    log.info("projection_completed", points=n, neighbours=k, a=round(a, 4), b=round(b, 4))
    return layout


def neighbor_purity(coords: np.ndarray, labels: Sequence, k: int = 10) -> float:
    """Mean fraction of each point's k nearest 2-D neighbours sharing its label."""
    labels = np.asarray(labels)
    if len(labels) != len(coords):
        raise DataError(f"{len(labels)} labels for {len(coords)} points")
    knn = knn_graph(np.asarray(coords, dtype=np.float64), k)
    return float(np.mean(labels[knn.indices] == labels[:, None]))


def write_layout_csv(
    path: Union[str, Path],
    ids: Sequence[str],
    layout: Layout,
    tags: Sequence[str],
) -> Path:
    rows = (
        (rxn_id, f"{x:.6f}", f"{y:.6f}", tag)
        for rxn_id, x, y, tag in zip(ids, layout.x.tolist(), layout.y.tolist(), tags)
    )
    return write_csv(path, LAYOUT_COLUMNS, rows)
