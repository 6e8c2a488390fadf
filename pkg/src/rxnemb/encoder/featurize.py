"""Atom features and normalized adjacency for the graph encoder."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from ..autodiff import Tensor
from ..chem.graph import ELEMENT_VOCAB, MolecularGraph

ATOM_FEATURE_DIM = 28

_ELEMENT_INDEX = {symbol: i for i, symbol in enumerate(ELEMENT_VOCAB)}
_DEGREE_OFFSET = len(ELEMENT_VOCAB)  # 11
_CHARGE_OFFSET = _DEGREE_OFFSET + 6  # 17
_AROMATIC_OFFSET = _CHARGE_OFFSET + 5  # 22
_HYDROGEN_OFFSET = _AROMATIC_OFFSET + 1  # 23


def atom_feature_matrix(graph: MolecularGraph, dtype=np.float32) -> np.ndarray:
    features = np.zeros((graph.num_atoms, ATOM_FEATURE_DIM), dtype=dtype)
    for i, atom in enumerate(graph.atoms):
        features[i, _ELEMENT_INDEX[atom.element]] = 1
        features[i, _DEGREE_OFFSET + min(graph.degree(i), 5)] = 1
        features[i, _CHARGE_OFFSET + int(np.clip(atom.formal_charge, -2, 2)) + 2] = 1
        features[i, _AROMATIC_OFFSET] = float(atom.aromatic)
        features[i, _HYDROGEN_OFFSET + min(atom.explicit_h, 4)] = 1
    return features


def featurize_atoms(graph: MolecularGraph, dtype=np.float32) -> Tensor:
    """One row per atom: element, degree, charge, aromatic flag, hydrogens."""
    return Tensor(atom_feature_matrix(graph, dtype), dtype=dtype)


def adjacency_matrix(graph: MolecularGraph, dtype=np.float32) -> np.ndarray:
    n = graph.num_atoms
    a = np.eye(n, dtype=np.float64)
    for bond in graph.bonds:
        a[bond.begin, bond.end] = 1.0
        a[bond.end, bond.begin] = 1.0
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return (a * inv_sqrt[:, None] * inv_sqrt[None, :]).astype(dtype)


def normalize_adjacency(graph: MolecularGraph, dtype=np.float32) -> Tensor:
    """D̃^-1/2 (A + I) D̃^-1/2 with bond orders ignored."""
    return Tensor(adjacency_matrix(graph, dtype), dtype=dtype)


@dataclass(frozen=True)
class SideGraphs:
    """All molecules of one reaction side, merged into one block-diagonal graph."""

    features: np.ndarray
    adjacency: np.ndarray
    membership: np.ndarray  # molecules × atoms, True where the atom belongs to the molecule
    atom_counts: tuple

    @property
    def num_molecules(self) -> int:
        return self.membership.shape[0]

    @property
    def num_atoms(self) -> int:
        return self.features.shape[0]


def prepare_side(graphs: Sequence[MolecularGraph], dtype=np.float32) -> SideGraphs:
    counts = tuple(g.num_atoms for g in graphs)
    features = np.concatenate([atom_feature_matrix(g, dtype) for g in graphs], axis=0)
    adjacency = block_diag(*[adjacency_matrix(g, dtype) for g in graphs]).astype(dtype)
    membership = np.zeros((len(graphs), sum(counts)), dtype=bool)
    start = 0
    for j, count in enumerate(counts):
        membership[j, start : start + count] = True
        start += count
    return SideGraphs(features, adjacency, membership, counts)


def merge_sides(sides: Sequence[SideGraphs]) -> SideGraphs:
    """Stack the sides of several reactions into one block-diagonal batch."""
    if len(sides) == 1:
        return sides[0]
    features = np.concatenate([s.features for s in sides], axis=0)
    adjacency = block_diag(*[s.adjacency for s in sides]).astype(sides[0].adjacency.dtype)
    membership = block_diag(*[s.membership for s in sides]).astype(bool)
    counts = tuple(c for s in sides for c in s.atom_counts)
    return SideGraphs(features, adjacency, membership, counts)
