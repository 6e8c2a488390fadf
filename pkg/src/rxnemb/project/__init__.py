"""Fuzzy neighbourhood graph and 2-D layout of embedding sets."""

from .graph import FuzzyGraph, KnnGraph, fuzzy_graph, knn_graph, smooth_knn
from .layout import Layout, epochs_per_sample, fit_ab, layout_sgd, target_curve
from .pipeline import LAYOUT_COLUMNS, neighbor_purity, project_embeddings, standardize, write_layout_csv

__all__ = [
    "FuzzyGraph",
    "KnnGraph",
    "LAYOUT_COLUMNS",
    "Layout",
    "epochs_per_sample",
    "fit_ab",
    "fuzzy_graph",
    "knn_graph",
    "layout_sgd",
    "neighbor_purity",
    "project_embeddings",
    "smooth_knn",
    "standardize",
    "target_curve",
    "write_layout_csv",
]
