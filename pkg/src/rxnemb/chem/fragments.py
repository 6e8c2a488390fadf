"""Bond cutting, fragment exchange and graph comparison."""

from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from ..core.errors import (
    BondInCycle,
    IndexOutOfRange,
    NotSingleOrder,
    ValenceUnderflow,
)
from .graph import Atom, Bond, BondOrder, MolecularGraph

_node_match = isomorphism.categorical_node_match(
    ["symbol", "charge", "aromatic", "hydrogens"], [None, 0, False, 0]
)
_edge_match = isomorphism.categorical_edge_match("order", None)


@dataclass(frozen=True)
class CutResult:
    """Two fragments of a cut plus the attachment atom inside each."""

    frag_a: MolecularGraph
    frag_b: MolecularGraph
    attach_a: int
    attach_b: int


def graphs_isomorphic(a: MolecularGraph, b: MolecularGraph) -> bool:
    """Attribute-aware isomorphism on atoms and bond orders."""
    if a.num_atoms != b.num_atoms or a.num_bonds != b.num_bonds:
        return False
    if sorted(_atom_key(x) for x in a.atoms) != sorted(_atom_key(x) for x in b.atoms):
        return False
    return nx.is_isomorphic(
        a.to_networkx(), b.to_networkx(), node_match=_node_match, edge_match=_edge_match
    )


def _atom_key(atom: Atom) -> Tuple:
    return atom.symbol, atom.formal_charge, atom.aromatic, atom.explicit_h


def cuttable_bonds(graph: MolecularGraph) -> List[int]:
    """Single bonds that are not part of any ring, ascending by index."""
    g = graph.to_networkx()
    bridges = {frozenset(edge) for edge in nx.bridges(g)}
    return [
        index
        for index, bond in enumerate(graph.bonds)
        if bond.order is BondOrder.SINGLE and frozenset(bond.endpoints) in bridges
    ]


def _subgraph(graph: MolecularGraph, keep: Sequence[int], attach: int) -> Tuple[MolecularGraph, int]:
    """Induced subgraph over ``keep`` (original order) with ``attach`` gaining one H."""
    remap = {old: new for new, old in enumerate(keep)}
    atoms = [graph.atoms[i] for i in keep]
    atoms[remap[attach]] = replace(atoms[remap[attach]], explicit_h=atoms[remap[attach]].explicit_h + 1)
    bonds = [
        Bond(remap[b.begin], remap[b.end], b.order)
        for b in graph.bonds
        if b.begin in remap and b.end in remap
    ]
    return MolecularGraph(tuple(atoms), tuple(bonds)), remap[attach]


def cut_acyclic_bond(graph: MolecularGraph, bond_index: int) -> CutResult:
    """Remove one acyclic single bond and return both sides.

    Fragment A holds the bond's first endpoint. Atoms keep their relative order.
    """
    if not 0 <= bond_index < graph.num_bonds:
        raise IndexOutOfRange(f"bond index {bond_index} outside [0, {graph.num_bonds})")
    bond = graph.bonds[bond_index]
    g = graph.to_networkx()
    g.remove_edge(bond.begin, bond.end)
    if nx.has_path(g, bond.begin, bond.end):
        raise BondInCycle(f"bond {bond_index} lies on a ring")
    if bond.order is not BondOrder.SINGLE:
        raise NotSingleOrder(f"bond {bond_index} is {bond.order.value}")

    side_a = sorted(nx.node_connected_component(g, bond.begin))
    side_b = sorted(nx.node_connected_component(g, bond.end))
    frag_a, attach_a = _subgraph(graph, side_a, bond.begin)
    frag_b, attach_b = _subgraph(graph, side_b, bond.end)
    return CutResult(frag_a, frag_b, attach_a, attach_b)


def _join(left: MolecularGraph, attach_left: int, right: MolecularGraph, attach_right: int) -> MolecularGraph:
    for frag, attach in ((left, attach_left), (right, attach_right)):
        if frag.atoms[attach].explicit_h == 0:
            raise ValenceUnderflow(
                f"attachment atom {frag.atoms[attach].symbol} has no hydrogen to give up"
            )

    offset = left.num_atoms
    atoms = list(left.atoms) + list(right.atoms)
    for index in (attach_left, offset + attach_right):
        atoms[index] = replace(atoms[index], explicit_h=atoms[index].explicit_h - 1)

    bonds = list(left.bonds)
    bonds.extend(Bond(b.begin + offset, b.end + offset, b.order) for b in right.bonds)
    bonds.append(Bond(attach_left, offset + attach_right, BondOrder.SINGLE))
    return MolecularGraph(tuple(atoms), tuple(bonds))


def exchange_fragments(a: CutResult, b: CutResult) -> Tuple[MolecularGraph, MolecularGraph]:
    """Swap second fragments: (A₁ + B₂, B₁ + A₂)."""
    first = _join(a.frag_a, a.attach_a, b.frag_b, b.attach_b)
    second = _join(b.frag_a, b.attach_a, a.frag_b, a.attach_b)
    return first, second
