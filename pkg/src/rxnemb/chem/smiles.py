"""SMILES parsing and writing for the supported grammar subset.

The grammar covers organic-subset atoms, bracket atoms (isotope, chirality,
hydrogen count, charge, atom map), ring closures including ``%nn``, branches,
bond symbols ``- = # : / \\`` and ``.`` separated fragments. Stereo markers are
accepted and discarded.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import structlog

from ..core.errors import (
    ComponentParseError,
    EmptySide,
    SmilesError,
    UnbalancedParen,
    UnbalancedRing,
    UnknownToken,
    ValenceUnderflow,
)
from .graph import MAX_EXPLICIT_H, VALENCES, Atom, Bond, BondOrder, MolecularGraph, Reaction

logger = structlog.get_logger()

ORGANIC_SUBSET = frozenset(VALENCES)
AROMATIC_ORGANIC = frozenset({"B", "C", "N", "O", "P", "S"})
# Only these elements are checked for over-specified hydrogens; P and S are
# commonly hypervalent in reaction data.
STRICT_VALENCE = frozenset({"B", "C", "N", "O", "F", "Cl", "Br", "I"})

PERIODIC_TABLE = frozenset(
    """
    H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu
    Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba
    La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi
    Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs Mt Ds
    Rg Cn Nh Fl Mc Lv Ts Og
    """.split()
)
AROMATIC_BRACKET = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S", "se": "Se", "as": "As", "te": "Te"}

BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
}

_ORGANIC_RE = re.compile(r"Cl|Br|[BCNOPSFI]|[bcnops]")
_BRACKET_RE = re.compile(
    r"""
    (?P<isotope>\d+)?
    (?P<symbol>[A-Z][a-z]?|se|as|te|[bcnops])
    (?P<chiral>@(?:@|TH[12]|AL[12]|SP[1-3]|TB\d{1,2}|OH\d{1,2})?)?
    (?P<hcount>H\d?)?
    (?P<charge>\+\+|--|[+-]\d*)?
    (?::(?P<map>\d+))?
    """,
    re.VERBOSE | re.ASCII,
)
_DIGITS = frozenset("0123456789")


def implicit_hydrogens(graph: MolecularGraph, index: int) -> int:
    """Hydrogens implied for an organic-subset atom written without brackets."""
    atom = graph.atoms[index]
    valences = VALENCES.get(atom.symbol)
    if valences is None:
        return 0
    bond_sum = graph.bond_order_sum(index)
    if atom.aromatic:
        return max(0, valences[0] - bond_sum - 1)
    for valence in valences:
        if valence >= bond_sum:
            return valence - bond_sum
    return 0


@dataclass
class _PendingAtom:
    symbol: str
    aromatic: bool
    charge: int
    hcount: Optional[int]
    atom_map: Optional[int]
    offset: int


@dataclass
class _PendingBond:
    begin: int
    end: int
    symbol: Optional[str]
    offset: int


class SmilesParser:
    """Single-pass SMILES tokenizer and graph builder.

    Instances hold no state between calls and can be shared across threads.
    """

    def parse(self, smiles: str) -> MolecularGraph:
        if not smiles:
            raise UnknownToken("empty SMILES", 0)

        atoms: List[_PendingAtom] = []
        bonds: List[_PendingBond] = []
        pairs: Dict[Tuple[int, int], int] = {}
        branch_stack: List[Tuple[int, int]] = []  # (atom, offset of '(')
        rings: Dict[int, Tuple[int, Optional[str], int]] = {}  # digit -> (atom, bond symbol, offset)

        prev: Optional[int] = None
        pending_bond: Optional[Tuple[str, int]] = None
        pos = 0
        n = len(smiles)

        def add_bond(i: int, j: int, symbol: Optional[str], offset: int) -> None:
            if i == j:
                raise UnknownToken("ring closure onto the same atom", offset)
            key = (min(i, j), max(i, j))
            if key in pairs:
                raise UnknownToken(f"duplicate bond between atoms {key[0]} and {key[1]}", offset)
            pairs[key] = len(bonds)
            bonds.append(_PendingBond(i, j, symbol, offset))

        while pos < n:
            ch = smiles[pos]

            if ch == "(":
                if prev is None or pending_bond is not None:
                    raise UnbalancedParen("branch without a preceding atom", pos)
                branch_stack.append((prev, pos))
                pos += 1
            elif ch == ")":
                if not branch_stack:
                    raise UnbalancedParen("unmatched ')'", pos)
                if pending_bond is not None:
                    raise UnknownToken("bond symbol without a following atom", pending_bond[1])
                if smiles[pos - 1] == "(":
                    raise UnbalancedParen("empty branch", pos - 1)
                prev, _ = branch_stack.pop()
                pos += 1
            elif ch in BOND_SYMBOLS:
                if prev is None or pending_bond is not None:
                    raise UnknownToken(f"unexpected bond symbol {ch!r}", pos)
                pending_bond = (ch, pos)
                pos += 1
            elif ch == ".":
                if pending_bond is not None or prev is None or branch_stack:
                    raise UnknownToken("unexpected '.'", pos)
                prev = None
                pos += 1
            elif ch in _DIGITS or ch == "%":
                if prev is None:
                    raise UnknownToken("ring closure without a preceding atom", pos)
                start = pos
                if ch == "%":
                    digits = smiles[pos + 1 : pos + 3]
                    if len(digits) != 2 or not _DIGITS.issuperset(digits):
                        raise UnknownToken("'%' must be followed by two digits", pos)
                    ring = int(digits)
                    pos += 3
                else:
                    ring = int(ch)
                    pos += 1
                bond_symbol = pending_bond[0] if pending_bond else None
                pending_bond = None
                if ring in rings:
                    opener, open_symbol, _ = rings.pop(ring)
                    if open_symbol and bond_symbol and open_symbol != bond_symbol:
                        raise UnknownToken("conflicting ring-closure bond symbols", start)
                    add_bond(opener, prev, bond_symbol or open_symbol, start)
                else:
                    rings[ring] = (prev, bond_symbol, start)
            elif ch == "[":
                close = smiles.find("]", pos)
                if close < 0:
                    raise UnknownToken("unterminated bracket atom", pos)
                atom = self._parse_bracket(smiles[pos + 1 : close], pos)
                self._attach(atoms, atom, prev, pending_bond, add_bond, pos)
                prev = len(atoms) - 1
                pending_bond = None
                pos = close + 1
            else:
                match = _ORGANIC_RE.match(smiles, pos)
                if match is None:
                    raise UnknownToken(f"unexpected character {ch!r}", pos)
                token = match.group(0)
                aromatic = token.islower()
                atom = _PendingAtom(
                    symbol=token.capitalize() if not aromatic else token.upper(),
                    aromatic=aromatic,
                    charge=0,
                    hcount=None,
                    atom_map=None,
                    offset=pos,
                )
                self._attach(atoms, atom, prev, pending_bond, add_bond, pos)
                prev = len(atoms) - 1
                pending_bond = None
                pos = match.end()

        if pending_bond is not None:
            raise UnknownToken("bond symbol without a following atom", pending_bond[1])
        if branch_stack:
            raise UnbalancedParen("unclosed '('", branch_stack[-1][1])
        if rings:
            _, _, offset = min(rings.values(), key=lambda r: r[2])
            raise UnbalancedRing("ring closure never closed", offset)
        if smiles[-1] == ".":
            raise UnknownToken("trailing '.'", n - 1)

        return self._build(atoms, bonds)

    def _attach(self, atoms, atom, prev, pending_bond, add_bond, pos) -> None:
        atoms.append(atom)
        if prev is not None:
            symbol = pending_bond[0] if pending_bond else None
            add_bond(prev, len(atoms) - 1, symbol, pending_bond[1] if pending_bond else pos)

    def _parse_bracket(self, body: str, offset: int) -> _PendingAtom:
        match = _BRACKET_RE.fullmatch(body)
        if match is None:
            raise UnknownToken(f"malformed bracket atom [{body}]", offset)

        raw = match.group("symbol")
        if raw in AROMATIC_BRACKET:
            symbol, aromatic = AROMATIC_BRACKET[raw], True
        elif raw in PERIODIC_TABLE:
            symbol, aromatic = raw, False
        else:
            raise UnknownToken(f"unknown element {raw!r}", offset + 1)

        hcount = 0
        if match.group("hcount"):
            digits = match.group("hcount")[1:]
            hcount = int(digits) if digits else 1
            if hcount > MAX_EXPLICIT_H:
                raise ValenceUnderflow(f"hydrogen count {hcount} exceeds {MAX_EXPLICIT_H}", offset)

        charge = 0
        text = match.group("charge")
        if text:
            if text in ("++", "--"):
                charge = 2 if text == "++" else -2
            else:
                magnitude = int(text[1:]) if len(text) > 1 else 1
                charge = magnitude if text[0] == "+" else -magnitude

        atom_map = int(match.group("map")) if match.group("map") else None
        return _PendingAtom(symbol, aromatic, charge, hcount, atom_map, offset)

    def _build(self, pending: List[_PendingAtom], pending_bonds: List[_PendingBond]) -> MolecularGraph:
        bonds = []
        for pb in pending_bonds:
            a, b = pending[pb.begin], pending[pb.end]
            both_aromatic = a.aromatic and b.aromatic
            if pb.symbol is None:
                order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
            else:
                order = BOND_SYMBOLS[pb.symbol]
                if order is BondOrder.AROMATIC and not both_aromatic:
                    raise UnknownToken("aromatic bond between non-aromatic atoms", pb.offset)
            bonds.append(Bond(pb.begin, pb.end, order))

        # Hydrogens are resolved once the full bond list is known.
        skeleton = MolecularGraph(
            tuple(Atom(p.symbol, p.charge, p.aromatic, 0, p.atom_map) for p in pending),
            tuple(bonds),
        )
        atoms = []
        for i, p in enumerate(pending):
            if p.hcount is None:
                hydrogens = implicit_hydrogens(skeleton, i)
            else:
                hydrogens = p.hcount
                if p.symbol in STRICT_VALENCE and not p.aromatic:
                    limit = max(VALENCES[p.symbol]) + abs(p.charge)
                    if skeleton.bond_order_sum(i) + hydrogens > limit:
                        raise ValenceUnderflow(
                            f"{p.symbol} with {hydrogens} H cannot carry its bonds", p.offset
                        )
            atoms.append(Atom(p.symbol, p.charge, p.aromatic, hydrogens, p.atom_map))
        return MolecularGraph(tuple(atoms), skeleton.bonds)


_parser = SmilesParser()


def parse_molecule(smiles: str) -> MolecularGraph:
    """Parse one SMILES string into a molecular graph."""
    return _parser.parse(smiles)


def parse_reaction(rxn_smiles: str, id: str, class_label: Optional[str] = None) -> Reaction:
    """Parse ``reactants>>products`` or ``reactants>agents>products``.

    Agents are merged into the reactant side after the reactants.
    """
    text = rxn_smiles.strip().split()[0] if rxn_smiles.strip() else ""
    parts = text.split(">")
    if len(parts) != 3:
        raise UnknownToken("reaction SMILES needs '>>' or exactly two '>'", max(0, text.find(">")))

    reactant_text = ".".join(p for p in (parts[0], parts[1]) if p)
    sides = {}
    for side, side_text in (("reactant", reactant_text), ("product", parts[2])):
        if not side_text:
            raise EmptySide(f"reaction {id!r} has an empty {side} side")
        components = []
        for index, component in enumerate(side_text.split(".")):
            try:
                components.append(parse_molecule(component))
            except SmilesError as e:
                logger.debug("component_parse_failed", reaction=id, side=side, index=index, error=str(e))
                raise ComponentParseError(side, index, e) from e
        sides[side] = tuple(components)

    return Reaction(id, sides["reactant"], sides["product"], class_label)


# --- writer -----------------------------------------------------------------


def _bond_symbol(graph: MolecularGraph, bond: Bond) -> str:
    if bond.order is BondOrder.DOUBLE:
        return "="
    if bond.order is BondOrder.TRIPLE:
        return "#"
    if bond.order is BondOrder.SINGLE:
        a, b = graph.atoms[bond.begin], graph.atoms[bond.end]
        return "-" if a.aromatic and b.aromatic else ""
    return ""


def _atom_token(graph: MolecularGraph, index: int) -> str:
    atom = graph.atoms[index]
    symbol = atom.symbol.lower() if atom.aromatic else atom.symbol
    bare_ok = (
        atom.symbol in ORGANIC_SUBSET
        and (not atom.aromatic or atom.symbol in AROMATIC_ORGANIC)
        and atom.formal_charge == 0
        and atom.atom_map is None
        and implicit_hydrogens(graph, index) == atom.explicit_h
    )
    if bare_ok:
        return symbol

    parts = ["[", symbol]
    if atom.explicit_h:
        parts.append("H" if atom.explicit_h == 1 else f"H{atom.explicit_h}")
    if atom.formal_charge:
        sign = "+" if atom.formal_charge > 0 else "-"
        magnitude = abs(atom.formal_charge)
        parts.append(sign if magnitude == 1 else f"{sign}{magnitude}")
    if atom.atom_map is not None:
        parts.append(f":{atom.atom_map}")
    parts.append("]")
    return "".join(parts)


def _ring_label(digit: int) -> str:
    return str(digit) if digit < 10 else f"%{digit:02d}"


class SmilesWriter:
    """Deterministic depth-first writer starting from the lowest atom index."""

    def write(self, graph: MolecularGraph) -> str:
        n = graph.num_atoms
        if n == 0:
            return ""

        rank: Dict[int, int] = {}
        children: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(n)}
        ring_bonds: Dict[int, List[int]] = {i: [] for i in range(n)}
        roots: List[int] = []
        seen_bonds = set()

        def discover(atom: int) -> None:
            rank[atom] = len(rank)
            for nbr in graph.neighbors(atom):
                bond = graph.find_bond(atom, nbr)
                if bond in seen_bonds:
                    continue
                seen_bonds.add(bond)
                if nbr in rank:
                    ring_bonds[atom].append(bond)
                    ring_bonds[nbr].append(bond)
                else:
                    children[atom].append((nbr, bond))
                    discover(nbr)

        for start in range(n):
            if start not in rank:
                roots.append(start)
                discover(start)

        open_digits: Dict[int, int] = {}  # bond -> digit
        out: List[str] = []

        def emit(atom: int) -> None:
            out.append(_atom_token(graph, atom))
            closing = [b for b in ring_bonds[atom] if b in open_digits]
            opening = [b for b in ring_bonds[atom] if b not in open_digits]
            for bond in closing:
                out.append(_ring_label(open_digits[bond]))
            for bond in opening:
                in_use = set(open_digits.values())
                digit = next(d for d in range(1, 100) if d not in in_use)
                open_digits[bond] = digit
                out.append(_bond_symbol(graph, graph.bonds[bond]) + _ring_label(digit))
            for bond in closing:
                del open_digits[bond]

            kids = children[atom]
            for position, (child, bond) in enumerate(kids):
                last = position == len(kids) - 1
                if not last:
                    out.append("(")
                out.append(_bond_symbol(graph, graph.bonds[bond]))
                emit(child)
                if not last:
                    out.append(")")

        for position, root in enumerate(roots):
            if position:
                out.append(".")
            emit(root)
        return "".join(out)


_writer = SmilesWriter()


def write_smiles(graph: MolecularGraph) -> str:
    """Serialize a graph; disconnected graphs are joined with '.'."""
    return _writer.write(graph)


def write_reaction_smiles(rxn: Reaction) -> str:
    reactants = ".".join(write_smiles(g) for g in rxn.reactant_components)
    products = ".".join(write_smiles(g) for g in rxn.product_components)
    return f"{reactants}>>{products}"
