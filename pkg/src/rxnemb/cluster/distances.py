"""Pairwise distances over embedding rows."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.spatial.distance import cdist

from ..core.errors import DataError, LengthMismatch, ZeroVectorCosine
from ..core.types import Metric
from ..utils.workers import map_ordered

logger = structlog.get_logger()

ROW_BLOCK = 512

Embeddings = Union[np.ndarray, Sequence[Sequence[float]]]


@dataclass
class DistanceMatrix:
    """Symmetric n×n distances with an exactly zero diagonal."""

    values: np.ndarray
    metric: Metric = Metric.EUCLIDEAN

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DataError(f"distance matrix must be square, got shape {values.shape}")
        self.values = values

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, index):
        return self.values[index]

    def submatrix(self, indices: Sequence[int]) -> "DistanceMatrix":
        index = np.asarray(indices, dtype=np.int64)
        return DistanceMatrix(self.values[np.ix_(index, index)], self.metric)


def as_matrix(embs: Embeddings) -> np.ndarray:
    """Stack embeddings into a float64 matrix, rejecting ragged input."""
    if isinstance(embs, np.ndarray):
        matrix = embs
    else:
        rows = [np.asarray(row, dtype=np.float64).reshape(-1) for row in embs]
        lengths = sorted({row.size for row in rows})
        if len(lengths) > 1:
            raise LengthMismatch(f"embeddings have different lengths: {lengths}")
        matrix = np.stack(rows) if rows else np.zeros((0, 0))
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise LengthMismatch(f"expected a 2-D embedding matrix, got shape {matrix.shape}")
    return matrix


def _check_cosine(X: np.ndarray) -> None:
    zero = np.flatnonzero(~np.any(X != 0, axis=1))
    if zero.size:
        raise ZeroVectorCosine(f"cosine distance undefined for zero vector at row {int(zero[0])}")


def cross_distances(A: np.ndarray, B: np.ndarray, metric: Metric = Metric.EUCLIDEAN) -> np.ndarray:
    """Distances from every row of A to every row of B."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape[1] != B.shape[1]:
        raise LengthMismatch(f"embedding lengths differ: {A.shape[1]} vs {B.shape[1]}")
    metric = Metric(metric)
    if metric is Metric.COSINE:
        _check_cosine(A)
        _check_cosine(B)
        return np.maximum(cdist(A, B, "cosine"), 0.0)
    return cdist(A, B, "euclidean")


def row_blocks(n: int, block: int = ROW_BLOCK) -> List[Tuple[int, int]]:
    return [(start, min(start + block, n)) for start in range(0, n, block)]


def pairwise_distances(
    embs: Embeddings,
    metric: Metric = Metric.EUCLIDEAN,
    workers: int = 1,
    block: int = ROW_BLOCK,
) -> DistanceMatrix:
    """Full distance matrix, computed over row blocks.

    The upper triangle is mirrored onto the lower one so the result is exactly
    symmetric, and the diagonal is exactly zero.
    """
    X = as_matrix(embs)
    if X.shape[0] < 2:
        raise DataError(f"need at least two embeddings, got {X.shape[0]}")
    metric = Metric(metric)
    if metric is Metric.COSINE:
        _check_cosine(X)

    blocks = map_ordered(lambda span: cross_distances(X[span[0] : span[1]], X, metric), row_blocks(len(X), block), workers)
    values = np.triu(np.vstack(blocks), k=1)
    values = values + values.T
    logger.debug("distance_matrix_built", n=len(X), metric=metric.value)
    return DistanceMatrix(values, metric)


def farthest_pair(X: np.ndarray, metric: Metric = Metric.EUCLIDEAN, block: int = ROW_BLOCK) -> Tuple[int, int, float]:
    """Globally farthest pair without materializing the matrix.

    Scans in row-major order and keeps the first maximum, so ties go to the
    lexicographically smallest (i, j) with i < j.
    """
    best = (-1.0, 0, 1)
    n = len(X)
    for start, stop in row_blocks(n, block):
        part = cross_distances(X[start:stop], X[start:], metric)
        # keep only j > i
        rows, cols = np.indices(part.shape)
        part = np.where(cols > rows, part, -np.inf)
        flat = int(np.argmax(part))
        r, c = divmod(flat, part.shape[1])
        if part[r, c] > best[0]:
            best = (float(part[r, c]), start + r, start + c)
    value, i, j = best
    return i, j, value


def retrieve_similar(
    query: np.ndarray,
    database: Embeddings,
    top_k: int = 10,
    metric: Metric = Metric.EUCLIDEAN,
    exclude: Optional[int] = None,
) -> List[Tuple[int, float]]:
    """Nearest database rows to ``query``; ties go to the lower index."""
    X = as_matrix(database)
    distances = cross_distances(np.asarray(query, dtype=np.float64).reshape(1, -1), X, metric)[0]
    order = np.lexsort((np.arange(len(X)), distances))
    if exclude is not None:
        order = order[order != exclude]
    return [(int(i), float(distances[i])) for i in order[: max(top_k, 0)]]
