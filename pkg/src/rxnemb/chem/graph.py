"""Molecular graph and reaction types."""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import networkx as nx

from ..core.errors import EmptySide

ELEMENT_VOCAB: Tuple[str, ...] = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "other")

# Standard valences used to resolve implicit hydrogens.
VALENCES: Dict[str, Tuple[int, ...]] = {
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

MAX_EXPLICIT_H = 8


class BondOrder(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    AROMATIC = "aromatic"

    @property
    def valence(self) -> int:
        """Contribution to the bond-order sum; aromatic counts as one."""
        return _BOND_VALENCE[self]


_BOND_VALENCE = {
    BondOrder.SINGLE: 1,
    BondOrder.DOUBLE: 2,
    BondOrder.TRIPLE: 3,
    BondOrder.AROMATIC: 1,
}


@dataclass(frozen=True)
class Atom:
    """A heavy atom with its hydrogen count resolved."""

    symbol: str
    formal_charge: int = 0
    aromatic: bool = False
    explicit_h: int = 0
    atom_map: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0 <= self.explicit_h <= MAX_EXPLICIT_H:
            raise ValueError(f"explicit_h must be in [0, {MAX_EXPLICIT_H}], got {self.explicit_h}")

    @property
    def element(self) -> str:
        """Vocabulary slot for featurization."""
        return self.symbol if self.symbol in VALENCES else "other"


@dataclass(frozen=True)
class Bond:
    begin: int
    end: int
    order: BondOrder = BondOrder.SINGLE

    @property
    def endpoints(self) -> Tuple[int, int]:
        return self.begin, self.end

    def other(self, atom: int) -> int:
        return self.end if atom == self.begin else self.begin


@dataclass(frozen=True)
class MolecularGraph:
    """Undirected molecular graph; each atom pair is bonded at most once."""

    atoms: Tuple[Atom, ...]
    bonds: Tuple[Bond, ...] = ()
    _adjacency: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "bonds", tuple(self.bonds))

        n = len(self.atoms)
        seen = set()
        adjacency: List[List[int]] = [[] for _ in range(n)]
        for index, bond in enumerate(self.bonds):
            i, j = bond.endpoints
            if i == j:
                raise ValueError(f"bond {index} is a self-loop on atom {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bond {index} references an atom outside [0, {n})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate bond between atoms {key[0]} and {key[1]}")
            seen.add(key)
            if bond.order is BondOrder.AROMATIC and not (
                self.atoms[i].aromatic and self.atoms[j].aromatic
            ):
                raise ValueError(f"aromatic bond {index} joins a non-aromatic atom")
            adjacency[i].append(index)
            adjacency[j].append(index)

        object.__setattr__(self, "_adjacency", tuple(tuple(a) for a in adjacency))

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    def incident_bonds(self, atom: int) -> Tuple[int, ...]:
        """Indices of bonds touching ``atom``."""
        return self._adjacency[atom]

    def neighbors(self, atom: int) -> List[int]:
        return sorted(self.bonds[b].other(atom) for b in self._adjacency[atom])

    def degree(self, atom: int) -> int:
        return len(self._adjacency[atom])

    def bond_order_sum(self, atom: int) -> int:
        return sum(self.bonds[b].order.valence for b in self._adjacency[atom])

    def find_bond(self, i: int, j: int) -> Optional[int]:
        for b in self._adjacency[i]:
            if self.bonds[b].other(i) == j:
                return b
        return None

    def with_atom(self, index: int, **changes) -> "MolecularGraph":
        atoms = list(self.atoms)
        atoms[index] = replace(atoms[index], **changes)
        return MolecularGraph(tuple(atoms), self.bonds)

    def to_networkx(self) -> nx.Graph:
        """Attribute-carrying networkx view used for graph questions."""
        g = nx.Graph()
        for i, atom in enumerate(self.atoms):
            g.add_node(
                i,
                symbol=atom.symbol,
                charge=atom.formal_charge,
                aromatic=atom.aromatic,
                hydrogens=atom.explicit_h,
            )
        for index, bond in enumerate(self.bonds):
            g.add_edge(bond.begin, bond.end, order=bond.order.value, index=index)
        return g

    @property
    def total_charge(self) -> int:
        return sum(a.formal_charge for a in self.atoms)


@dataclass(frozen=True)
class Reaction:
    """Reactant-side and product-side molecules of one reaction."""

    id: str
    reactant_components: Tuple[MolecularGraph, ...]
    product_components: Tuple[MolecularGraph, ...]
    class_label: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "reactant_components", tuple(self.reactant_components))
        object.__setattr__(self, "product_components", tuple(self.product_components))
        if not self.reactant_components:
            raise EmptySide(f"reaction {self.id!r} has no reactant components")
        if not self.product_components:
            raise EmptySide(f"reaction {self.id!r} has no product components")

    def sides(self) -> Tuple[Tuple[str, Tuple[MolecularGraph, ...]], ...]:
        return (("reactant", self.reactant_components), ("product", self.product_components))
