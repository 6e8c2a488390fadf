"""Distances, centroid selection, assignment and leaf ordering over embeddings."""

from .distances import DistanceMatrix, cross_distances, farthest_pair, pairwise_distances, retrieve_similar
from .ordering import Dendrogram, average_linkage_tree, optimal_leaf_order, ordering_cost
from .reclassify import Reclassification, reclassify
from .selection import (
    ClusterAssignment,
    assign_nearest,
    group_by_labels,
    group_centroid_vectors,
    kennard_stone_select,
    label_crosstab,
)

__all__ = [
    "ClusterAssignment",
    "Dendrogram",
    "DistanceMatrix",
    "Reclassification",
    "assign_nearest",
    "average_linkage_tree",
    "cross_distances",
    "farthest_pair",
    "group_by_labels",
    "group_centroid_vectors",
    "kennard_stone_select",
    "label_crosstab",
    "optimal_leaf_order",
    "ordering_cost",
    "pairwise_distances",
    "reclassify",
    "retrieve_similar",
]
