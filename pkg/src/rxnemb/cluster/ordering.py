"""Average-linkage trees and optimal leaf ordering."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
import structlog

from ..core.errors import DataError, TreeMatrixMismatch
from .distances import DistanceMatrix

logger = structlog.get_logger()

Merge = Tuple[int, int, float]


@dataclass
class Dendrogram:
    """Binary merge tree over ``n_leaves`` leaves.

    Node ids follow the SciPy convention: leaves are ``0..n-1`` and merge
    ``i`` creates node ``n + i``.
    """

    n_leaves: int
    merges: List[Merge] = field(default_factory=list)
    sizes: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.merges) != self.n_leaves - 1:
            raise DataError(f"{self.n_leaves} leaves need {self.n_leaves - 1} merges, got {len(self.merges)}")
        if not self.sizes:
            sizes = [1] * self.n_leaves
            for left, right, _ in self.merges:
                sizes.append(sizes[left] + sizes[right])
            self.sizes = sizes[self.n_leaves :]

    @property
    def root(self) -> int:
        return 2 * self.n_leaves - 2

    @property
    def heights(self) -> List[float]:
        return [height for _, _, height in self.merges]

    def children(self, node: int) -> Tuple[int, int]:
        left, right, _ = self.merges[node - self.n_leaves]
        return left, right

    def is_leaf(self, node: int) -> bool:
        return node < self.n_leaves

    def leaves(self, node: int = -1) -> List[int]:
        """Leaves under ``node`` in unflipped left-to-right order."""
        node = self.root if node < 0 else node
        out, stack = [], [node]
        while stack:
            current = stack.pop()
            if self.is_leaf(current):
                out.append(current)
            else:
                left, right = self.children(current)
                stack.extend((right, left))
        return out

    def to_linkage(self) -> np.ndarray:
        """(n-1)×4 SciPy linkage matrix."""
        return np.array(
            [[left, right, height, size] for (left, right, height), size in zip(self.merges, self.sizes)],
            dtype=np.float64,
        ).reshape(-1, 4)


def average_linkage_tree(dm: DistanceMatrix) -> Dendrogram:
    """UPGMA over a distance matrix.

    Among equally close cluster pairs the lexicographically smallest pair of
    node ids merges first. Heights are kept non-decreasing.
    """
    n = dm.n
    if n < 2:
        raise DataError(f"need at least two items to build a tree, got {n}")

    total = 2 * n - 1
    D = np.full((total, total), np.inf)
    D[:n, :n] = dm.values
    size = np.zeros(total, dtype=np.int64)
    size[:n] = 1
    active = list(range(n))
    merges: List[Merge] = []
    previous = 0.0

    for step in range(n - 1):
        ids = np.array(active)
        block = D[np.ix_(ids, ids)]
        block = np.where(np.triu(np.ones_like(block, dtype=bool), k=1), block, np.inf)
        r, c = divmod(int(np.argmin(block)), len(ids))
        left, right = int(ids[r]), int(ids[c])
        height = max(float(block[r, c]), previous)
        previous = height

        new = n + step
        size[new] = size[left] + size[right]
        others = [a for a in active if a not in (left, right)]
        if others:
            linked = (size[left] * D[left, others] + size[right] * D[right, others]) / size[new]
            D[new, others] = linked
            D[others, new] = linked
        D[new, new] = 0.0
        active = others + [new]
        merges.append((left, right, height))

    return Dendrogram(n, merges, size[n:].tolist())


def ordering_cost(order: Sequence[int], dm: DistanceMatrix) -> float:
    """Correctly rounded sum of distances between adjacent leaves."""
    values = dm.values
    return math.fsum(float(values[a, b]) for a, b in zip(order[:-1], order[1:]))


class _LeafOrderer:
    """Dynamic program over subtree flips.

    For every node and every (first, last) leaf pair with the two ends in
    different children, keeps the minimum cost and the lexicographically
    smallest ordering reaching it.
    """

    def __init__(self, tree: Dendrogram, dm: DistanceMatrix):
        self.tree = tree
        self.D = dm.values
        self.scale = float(np.abs(self.D).max()) or 1.0
        self.tolerance = 1e-12 * self.scale * max(tree.n_leaves, 1)
        self.cost: Dict[int, Dict[Tuple[int, int], float]] = {}
        self.order: Dict[int, Dict[Tuple[int, int], Tuple[int, ...]]] = {}

    def _better(self, cost: float, seq: Tuple[int, ...], best_cost: float, best_seq: Tuple[int, ...]) -> bool:
        if cost < best_cost - self.tolerance:
            return True
        return abs(cost - best_cost) <= self.tolerance and seq < best_seq

    def _combine(self, first: int, second: int, node: int) -> None:
        """Orderings of ``node`` that run through child ``first`` then child ``second``."""
        cost_a, order_a = self.cost[first], self.order[first]
        cost_b, order_b = self.cost[second], self.order[second]
        ends_a: Dict[int, List[Tuple[int, float]]] = {}
        for (a, m), c in cost_a.items():
            ends_a.setdefault(a, []).append((m, c))
        starts_b: Dict[int, List[Tuple[int, float]]] = {}
        for (k, b), c in cost_b.items():
            starts_b.setdefault(b, []).append((k, c))

        for a, tails in ends_a.items():
            m_idx = np.array([m for m, _ in tails])
            m_cost = np.array([c for _, c in tails])
            for b, heads in starts_b.items():
                k_idx = np.array([k for k, _ in heads])
                k_cost = np.array([c for _, c in heads])
                grid = m_cost[:, None] + self.D[np.ix_(m_idx, k_idx)] + k_cost[None, :]
                best = float(grid.min())
                best_seq = None
                for i, j in np.argwhere(grid <= best + self.tolerance):
                    seq = order_a[(a, int(m_idx[i]))] + order_b[(int(k_idx[j]), b)]
                    if best_seq is None or seq < best_seq:
                        best_seq = seq
                key = (a, b)
                current = self.cost[node].get(key)
                if current is None or self._better(best, best_seq, current, self.order[node][key]):
                    self.cost[node][key] = best
                    self.order[node][key] = best_seq

    def run(self) -> List[int]:
        tree = self.tree
        for leaf in range(tree.n_leaves):
            self.cost[leaf] = {(leaf, leaf): 0.0}
            self.order[leaf] = {(leaf, leaf): (leaf,)}
        for step in range(tree.n_leaves - 1):
            node = tree.n_leaves + step
            left, right = tree.children(node)
            self.cost[node], self.order[node] = {}, {}
            self._combine(left, right, node)
            self._combine(right, left, node)
            for child in (left, right):
                if not tree.is_leaf(child):
                    del self.cost[child], self.order[child]

        root = tree.root
        best_key = None
        for key, cost in self.cost[root].items():
            if best_key is None or self._better(cost, self.order[root][key], self.cost[root][best_key], self.order[root][best_key]):
                best_key = key
        return list(self.order[root][best_key])


def optimal_leaf_order(tree: Dendrogram, dm: DistanceMatrix) -> List[int]:
    """Leaf order minimizing the adjacent-leaf distance sum over all subtree flips.

    Ties go to the lexicographically smallest permutation.
    """
    if tree.n_leaves != dm.n:
        raise TreeMatrixMismatch(f"tree has {tree.n_leaves} leaves, distance matrix has {dm.n} items")
    if tree.n_leaves == 1:
        return [0]
    order = _LeafOrderer(tree, dm).run()
    logger.debug("leaf_order_optimized", leaves=len(order), cost=ordering_cost(order, dm))
    return order
