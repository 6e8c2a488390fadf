"""Real/fictitious corpus construction and JSON-lines I/O."""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..chem import (
    MolecularGraph,
    Reaction,
    cut_acyclic_bond,
    cuttable_bonds,
    exchange_fragments,
    graphs_isomorphic,
    parse_reaction,
    write_reaction_smiles,
)
from ..core.errors import DataError, NoCuttableBond, SmilesError
from ..utils.files import read_jsonl, write_jsonl
from ..utils.workers import map_ordered

logger = structlog.get_logger()

FICTITIOUS_SUFFIX = "~fict"


@dataclass(frozen=True)
class LabeledReaction:
    """A reaction with its real/fictitious label.

    Fictitious entries name the real reaction they were derived from
    (``source_id``) and the partner whose product supplied a fragment.
    """

    reaction: Reaction
    is_real: bool
    source_id: str
    partner_id: Optional[str] = None

    def to_record(self) -> dict:
        record = {
            "id": self.reaction.id,
            "rxn_smiles": write_reaction_smiles(self.reaction),
            "is_real": self.is_real,
            "source_id": self.source_id,
        }
        if self.partner_id is not None:
            record["partner_id"] = self.partner_id
        if self.reaction.class_label is not None:
            record["label"] = self.reaction.class_label
        return record


def _cuttable_components(graphs: Sequence[MolecularGraph]) -> List[Tuple[int, List[int]]]:
    out = []
    for index, graph in enumerate(graphs):
        bonds = cuttable_bonds(graph)
        if bonds:
            out.append((index, bonds))
    return out


def _fictitious_for(
    index: int,
    real: Sequence[Reaction],
    cuttable: Sequence[List[Tuple[int, List[int]]]],
    seed: int,
    max_tries: int,
) -> Optional[LabeledReaction]:
    rxn = real[index]
    rng = np.random.default_rng(seed ^ index)
    own = cuttable[index]
    if not own:
        error = NoCuttableBond(f"product of {rxn.id!r} has no acyclic single bond")
        logger.warning("corpus_entry_dropped", reaction=rxn.id, reason=str(error))
        return None

    for _ in range(max_tries):
        partner = int(rng.integers(len(real) - 1))
        if partner >= index:
            partner += 1
        component, bonds = own[int(rng.integers(len(own)))]
        partner_choices = cuttable[partner]
        if not partner_choices:
            continue
        partner_component, partner_bonds = partner_choices[int(rng.integers(len(partner_choices)))]

        original = rxn.product_components[component]
        cut_own = cut_acyclic_bond(original, bonds[int(rng.integers(len(bonds)))])
        cut_partner = cut_acyclic_bond(
            real[partner].product_components[partner_component],
            partner_bonds[int(rng.integers(len(partner_bonds)))],
        )
        first, second = exchange_fragments(cut_own, cut_partner)
        candidate = first if rng.integers(2) == 0 else second
        if graphs_isomorphic(candidate, original):
            continue

        products = list(rxn.product_components)
        products[component] = candidate
        fictitious = Reaction(rxn.id + FICTITIOUS_SUFFIX, rxn.reactant_components, tuple(products))
        return LabeledReaction(fictitious, False, rxn.id, real[partner].id)

    logger.warning("corpus_entry_dropped", reaction=rxn.id, reason=f"no distinct product after {max_tries} tries")
    return None


def make_fictitious_corpus(
    real: Sequence[Reaction],
    seed: int = 0,
    max_tries: int = 10,
    workers: int = 1,
) -> List[LabeledReaction]:
    """Real entries interleaved with one fragment-exchange counterpart each.

    Each entry draws from its own stream seeded with ``seed ^ index``, so the
    result does not depend on the worker count.
    """
    real = list(real)
    if len(real) < 2:
        raise DataError(f"fragment exchange needs at least two real reactions, got {len(real)}")

    cuttable = map_ordered(lambda r: _cuttable_components(r.product_components), real, workers)
    fictitious = map_ordered(
        lambda i: _fictitious_for(i, real, cuttable, seed, max_tries), range(len(real)), workers
    )

    corpus: List[LabeledReaction] = []
    dropped = 0
    for rxn, fict in zip(real, fictitious):
        corpus.append(LabeledReaction(rxn, True, rxn.id))
        if fict is None:
            dropped += 1
        else:
            corpus.append(fict)

    logger.info("corpus_built", real=len(real), fictitious=len(real) - dropped, dropped=dropped)
    return corpus


def parse_records(records: Iterable[dict], source: str = "<records>") -> Tuple[List[Tuple[Reaction, dict]], int]:
    """Parse JSON-lines records; unparseable reactions are logged and counted."""
    parsed = []
    skipped = 0
    for position, record in enumerate(records):
        rxn_id = str(record.get("id", f"rxn-{position:06d}"))
        smiles = record.get("rxn_smiles")
        if not isinstance(smiles, str):
            logger.warning("reaction_skipped", source=source, reaction=rxn_id, reason="missing rxn_smiles")
            skipped += 1
            continue
        label = record.get("label")
        try:
            rxn = parse_reaction(smiles, rxn_id, None if label is None else str(label))
        except (SmilesError, DataError) as e:
            logger.warning("reaction_skipped", source=source, reaction=rxn_id, reason=str(e))
            skipped += 1
            continue
        parsed.append((rxn, record))
    return parsed, skipped


def read_reactions_jsonl(path: Union[str, Path]) -> Tuple[List[Reaction], int]:
    parsed, skipped = parse_records(read_jsonl(path), source=str(path))
    return [rxn for rxn, _ in parsed], skipped


def read_corpus_jsonl(path: Union[str, Path], seed: int = 0, max_tries: int = 10, workers: int = 1) -> List[LabeledReaction]:
    """Load a labelled corpus, or build one when records carry no ``is_real``."""
    parsed, _ = parse_records(read_jsonl(path), source=str(path))
    if not parsed:
        raise DataError(f"{path} contains no usable reactions")
    if all("is_real" not in record for _, record in parsed):
        return make_fictitious_corpus([rxn for rxn, _ in parsed], seed, max_tries, workers)
    return [
        LabeledReaction(
            rxn,
            bool(record.get("is_real", True)),
            str(record.get("source_id", rxn.id)),
            record.get("partner_id"),
        )
        for rxn, record in parsed
    ]


def write_corpus_jsonl(path: Union[str, Path], corpus: Sequence[LabeledReaction]) -> Path:
    return write_jsonl(path, (entry.to_record() for entry in corpus))
