"""Data-driven reclassification of an embedded reaction set."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import structlog

from ..core.types import ClusterConfig
from .distances import DistanceMatrix, Embeddings, as_matrix
from .ordering import Dendrogram, average_linkage_tree, optimal_leaf_order, ordering_cost
from .selection import ClusterAssignment, assign_nearest, group_centroid_vectors, kennard_stone_select, label_crosstab

logger = structlog.get_logger()


@dataclass
class Reclassification:
    assignment: ClusterAssignment
    group_means: np.ndarray
    group_distances: DistanceMatrix
    tree: Dendrogram
    order: List[int]
    label_counts: Optional[Dict[int, Dict[str, int]]] = None

    @property
    def order_cost(self) -> float:
        return ordering_cost(self.order, self.group_distances)

    def ordered_distances(self) -> np.ndarray:
        """Inter-group matrix with rows and columns in leaf order."""
        index = np.asarray(self.order)
        return self.group_distances.values[np.ix_(index, index)]


def reclassify(
    embs: Embeddings,
    config: Optional[ClusterConfig] = None,
    labels: Optional[Sequence[Optional[str]]] = None,
) -> Reclassification:
    """Select k mutually distant centroids, assign every reaction to the
    nearest one, then order the groups so that close groups sit together."""
    config = config or ClusterConfig()
    X = as_matrix(embs)
    log = logger.bind(component="Reclassifier")

    centroids = kennard_stone_select(X, config.k, config.metric)
    assignment = assign_nearest(X, centroids, config.metric)
    means, group_dm = group_centroid_vectors(X, assignment, config.group_distance, config.metric)
    tree = average_linkage_tree(group_dm)
    order = optimal_leaf_order(tree, group_dm)

    counts = None
    if labels is not None and any(label is not None for label in labels):
        counts = label_crosstab(assignment, labels)

    result = Reclassification(assignment, means, group_dm, tree, order, counts)
    log.info(
        "reclassified",
        reactions=len(X),
        k=config.k,
        largest=max(assignment.sizes),
        smallest=min(assignment.sizes),
        order_cost=result.order_cost,
    )
    return result
