"""Centroid selection, nearest-centroid assignment and group summaries."""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..core.errors import ConfigError, DataError, KTooLarge
from ..core.types import GroupDistance, Metric
from .distances import DistanceMatrix, Embeddings, as_matrix, cross_distances, farthest_pair, pairwise_distances

logger = structlog.get_logger()


@dataclass
class ClusterAssignment:
    """Flat clustering: one centroid item per cluster and a label per item."""

    k: int
    centroid_indices: List[int]
    labels: np.ndarray

    @property
    def sizes(self) -> List[int]:
        return np.bincount(self.labels, minlength=self.k).tolist()

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def is_centroid(self, index: int) -> bool:
        return index in self.centroid_indices


def kennard_stone_select(
    data: Union[DistanceMatrix, Embeddings],
    k: int,
    metric: Metric = Metric.EUCLIDEAN,
) -> List[int]:
    """Kennard-Stone: start from the farthest pair, then add the item farthest
    from everything selected so far.

    Accepts a precomputed DistanceMatrix or raw embeddings; with embeddings,
    rows are computed on demand so memory stays O(n). Ties go to the smallest
    index.
    """
    if isinstance(data, DistanceMatrix):
        n = data.n
        D = data.values
        row = lambda i: D[i]  # noqa: E731
    else:
        X = as_matrix(data)
        n = len(X)
        row = lambda i: cross_distances(X[i : i + 1], X, metric)[0]  # noqa: E731

    if k > n:
        raise KTooLarge(f"asked for {k} centroids from {n} items")
    if k < 2:
        raise ConfigError(f"k must be at least 2, got {k}")
    if k == n:
        return list(range(n))

    if isinstance(data, DistanceMatrix):
        flat = int(np.argmax(D))
        first, second = sorted(divmod(flat, n))
    else:
        first, second, _ = farthest_pair(X, metric)

    selected = [first, second]
    nearest = np.minimum(row(first), row(second)).astype(np.float64)
    taken = np.zeros(n, dtype=bool)
    taken[selected] = True

    while len(selected) < k:
        candidate = np.where(taken, -np.inf, nearest)
        pick = int(np.argmax(candidate))
        selected.append(pick)
        taken[pick] = True
        nearest = np.minimum(nearest, row(pick))

    logger.debug("centroids_selected", k=k, n=n)
    return selected


def assign_nearest(
    data: Union[DistanceMatrix, Embeddings],
    centroid_indices: Sequence[int],
    metric: Metric = Metric.EUCLIDEAN,
) -> ClusterAssignment:
    """Label every item with its nearest centroid; ties go to the lower centroid position."""
    centroids = [int(c) for c in centroid_indices]
    n = data.n if isinstance(data, DistanceMatrix) else len(as_matrix(data))
    if len(set(centroids)) != len(centroids):
        raise DataError("centroid indices must be distinct")
    if any(c < 0 or c >= n for c in centroids):
        raise DataError(f"centroid index out of range for {n} items")

    if isinstance(data, DistanceMatrix):
        to_centroids = data.values[:, centroids]
    else:
        X = as_matrix(data)
        to_centroids = cross_distances(X, X[centroids], metric)

    labels = np.argmin(to_centroids, axis=1).astype(np.int64)
    # duplicated vectors can make a centroid tie with an earlier one
    labels[centroids] = np.arange(len(centroids))
    return ClusterAssignment(len(centroids), centroids, labels)


def _medoid(X: np.ndarray, metric: Metric) -> int:
    if len(X) == 1:
        return 0
    return int(np.argmin(cross_distances(X, X, metric).sum(axis=1)))


def group_centroid_vectors(
    embs: Embeddings,
    assignment: ClusterAssignment,
    mode: GroupDistance = GroupDistance.MEAN,
    metric: Metric = Metric.EUCLIDEAN,
) -> Tuple[np.ndarray, DistanceMatrix]:
    """Per-cluster mean embeddings and the inter-group distance matrix.

    ``mode`` selects how two groups are compared: distance between means,
    average over all member pairs, or distance between medoids.
    """
    X = as_matrix(embs)
    k = assignment.k
    sums = np.zeros((k, X.shape[1]), dtype=np.float64)
    np.add.at(sums, assignment.labels, X)
    counts = np.bincount(assignment.labels, minlength=k).astype(np.float64)
    if np.any(counts == 0):
        raise DataError(f"cluster {int(np.flatnonzero(counts == 0)[0])} has no members")
    means = sums / counts[:, None]

    mode = GroupDistance(mode)
    if mode is GroupDistance.MEAN:
        dm = pairwise_distances(means, metric)
    elif mode is GroupDistance.MEDOID:
        members = [assignment.members(c) for c in range(k)]
        medoids = [int(m[_medoid(X[m], metric)]) for m in members]
        dm = pairwise_distances(X[medoids], metric)
    else:
        members = [assignment.members(c) for c in range(k)]
        values = np.zeros((k, k))
        for a in range(k):
            for b in range(a + 1, k):
                values[a, b] = values[b, a] = cross_distances(X[members[a]], X[members[b]], metric).mean()
        dm = DistanceMatrix(values, metric)
    return means, dm


def group_by_labels(
    embs: Embeddings,
    labels: Sequence[Optional[str]],
    metric: Metric = Metric.EUCLIDEAN,
) -> Tuple[List[str], np.ndarray, DistanceMatrix]:
    """Mean embedding per original class label; unlabelled rows are ignored."""
    X = as_matrix(embs)
    if len(labels) != len(X):
        raise _label_count_error(len(labels), len(X))
    names = sorted({label for label in labels if label is not None})
    if len(names) < 2:
        raise DataError(f"need at least two distinct labels, found {len(names)}")
    position = {name: i for i, name in enumerate(names)}
    keep = np.array([label is not None for label in labels])
    codes = np.array([position[label] for label in labels if label is not None], dtype=np.int64)
    sums = np.zeros((len(names), X.shape[1]))
    np.add.at(sums, codes, X[keep])
    means = sums / np.bincount(codes, minlength=len(names))[:, None]
    return names, means, pairwise_distances(means, metric)


def _label_count_error(n_labels: int, n_rows: int) -> DataError:
    return DataError(f"{n_labels} labels for {n_rows} embeddings")


def label_crosstab(assignment: ClusterAssignment, labels: Sequence[Optional[str]]) -> Dict[int, Dict[str, int]]:
    """Original-label counts inside each cluster, most common first."""
    if len(labels) != len(assignment.labels):
        raise _label_count_error(len(labels), len(assignment.labels))
    table: Dict[int, Counter] = {c: Counter() for c in range(assignment.k)}
    for cluster, label in zip(assignment.labels.tolist(), labels):
        if label is not None:
            table[cluster][label] += 1
    return {
        cluster: dict(sorted(counts.items(), key=lambda item: (-item[1], item[0])))
        for cluster, counts in table.items()
    }
