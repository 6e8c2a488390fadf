"""Exact k-NN, local calibration and the symmetrized fuzzy graph."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse
import structlog

from ..cluster.distances import as_matrix, cross_distances, row_blocks
from ..core.errors import KTooLarge
from ..utils.workers import map_ordered

logger = structlog.get_logger()

SIGMA_BRACKET = (1e-6, 1e6)
SIGMA_ITERATIONS = 64
KNN_BLOCK = 256


@dataclass
class KnnGraph:
    indices: np.ndarray
    distances: np.ndarray

    @property
    def n(self) -> int:
        return int(self.indices.shape[0])

    @property
    def k(self) -> int:
        return int(self.indices.shape[1])


@dataclass
class FuzzyGraph:
    """Symmetric membership matrix; every stored weight lies in (0, 1]."""

    matrix: scipy.sparse.csr_matrix

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    def edges(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once (head < tail), in row-major order."""
        upper = scipy.sparse.triu(self.matrix, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return upper.row[order].astype(np.int64), upper.col[order].astype(np.int64), upper.data[order]


def _nearest_block(X: np.ndarray, start: int, stop: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    dist = cross_distances(X[start:stop], X)
    rows = np.arange(stop - start)
    dist[rows, rows + start] = np.inf
    # every candidate tied with the k-th distance, so ties resolve by index
    kth = np.partition(dist, k - 1, axis=1)[:, k - 1 : k]
    indices = np.empty((stop - start, k), dtype=np.int64)
    for r in rows:
        candidates = np.flatnonzero(dist[r] <= kth[r, 0])
        order = np.lexsort((candidates, dist[r, candidates]))[:k]
        indices[r] = candidates[order]
    return indices, np.take_along_axis(dist, indices, axis=1)


def knn_graph(embs, k: int, workers: int = 1) -> KnnGraph:
    """Brute-force Euclidean k nearest neighbours, self excluded, ties by index."""
    X = as_matrix(embs)
    n = len(X)
    if k >= n:
        raise KTooLarge(f"{k} neighbours requested for {n} points")
    if k < 1:
        raise KTooLarge(f"k must be positive, got {k}")
    parts = map_ordered(lambda span: _nearest_block(X, span[0], span[1], k), row_blocks(n, KNN_BLOCK), workers)
    return KnnGraph(np.vstack([p[0] for p in parts]), np.vstack([p[1] for p in parts]))


def smooth_knn(distances: np.ndarray, k: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Per-point (rho, sigma).

    rho is the nearest-neighbour distance; sigma is bisected on a fixed bracket
    so the memberships of the k neighbours sum to log2(k). Points whose
    neighbours all sit at rho get the bracket maximum.
    """
    distances = np.atleast_2d(np.asarray(distances, dtype=np.float64))
    k = distances.shape[1] if k is None else k
    target = np.log2(k)
    rho = distances.min(axis=1)
    excess = np.maximum(distances - rho[:, None], 0.0)

    lo = np.full(len(distances), SIGMA_BRACKET[0])
    hi = np.full(len(distances), SIGMA_BRACKET[1])
    for _ in range(SIGMA_ITERATIONS):
        mid = 0.5 * (lo + hi)
        total = np.exp(-excess / mid[:, None]).sum(axis=1)
        too_wide = total > target
        hi = np.where(too_wide, mid, hi)
        lo = np.where(too_wide, lo, mid)
    sigma = 0.5 * (lo + hi)

    degenerate = ~np.any(excess > 0, axis=1)
    sigma[degenerate] = SIGMA_BRACKET[1]
    return rho, sigma


def fuzzy_graph(knn: KnnGraph, rho: np.ndarray, sigma: np.ndarray) -> FuzzyGraph:
    """Directed memberships exp(-(d - rho)/sigma), then fuzzy union a + b - ab."""
    n, k = knn.indices.shape
    rows = np.repeat(np.arange(n), k)
    cols = knn.indices.reshape(-1)
    excess = np.maximum(knn.distances - rho[:, None], 0.0)
    values = np.exp(-excess / sigma[:, None]).reshape(-1)

    directed = scipy.sparse.coo_matrix((values, (rows, cols)), shape=(n, n)).tocsr()
    directed.eliminate_zeros()
    transpose = directed.transpose().tocsr()
    union = (directed + transpose - directed.multiply(transpose)).tocsr()
    union.data = np.minimum(union.data, 1.0)
    union.eliminate_zeros()
    union.sort_indices()
    logger.debug("fuzzy_graph_built", points=n, edges=union.nnz // 2)
    return FuzzyGraph(union)
