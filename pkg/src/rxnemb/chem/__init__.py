"""SMILES parsing, writing and fragment operations."""

from .fragments import CutResult, cut_acyclic_bond, cuttable_bonds, exchange_fragments, graphs_isomorphic
from .graph import ELEMENT_VOCAB, Atom, Bond, BondOrder, MolecularGraph, Reaction
from .smiles import (
    SmilesParser,
    SmilesWriter,
    implicit_hydrogens,
    parse_molecule,
    parse_reaction,
    write_reaction_smiles,
    write_smiles,
)

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "CutResult",
    "ELEMENT_VOCAB",
    "MolecularGraph",
    "Reaction",
    "SmilesParser",
    "SmilesWriter",
    "cut_acyclic_bond",
    "cuttable_bonds",
    "exchange_fragments",
    "graphs_isomorphic",
    "implicit_hydrogens",
    "parse_molecule",
    "parse_reaction",
    "write_reaction_smiles",
    "write_smiles",
]
