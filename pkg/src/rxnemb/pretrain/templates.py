"""Template reactions for a desk-scale pre-training corpus."""

from typing import Callable, Dict, List, Tuple

import numpy as np
import structlog

from ..chem import Reaction, parse_reaction

logger = structlog.get_logger()

# Substituents are written attachment atom first, so "O" + R is R–OH and
# a bare R is the parent hydrocarbon.
ALKYL = (
    "C",
    "CC",
    "CCC",
    "C(C)C",
    "CCCC",
    "CC(C)C",
    "C(C)(C)C",
    "CC1CC1",
    "C1CCCCC1",
    "Cc1ccccc1",
)
ARYL = (
    "c1ccccc1",
    "c1ccc(C)cc1",
    "c1ccc(Cl)cc1",
    "c1ccc(OC)cc1",
    "c1ccc(F)cc1",
    "c1ccncc1",
    "c1ccc2ccccc2c1",
    "c1cccs1",
)
SUBSTITUENTS = ALKYL + ARYL

Picker = Callable[[Tuple[str, ...]], str]


def _esterification(pick: Picker) -> str:
    acid, alcohol = pick(SUBSTITUENTS), pick(SUBSTITUENTS)
    return f"O=C(O){acid}.O{alcohol}.OS(=O)(=O)O>>O=C({acid})O{alcohol}"


def _n_alkylation(pick: Picker) -> str:
    amine, alkyl = pick(SUBSTITUENTS), pick(ALKYL)
    return f"N{amine}.Br{alkyl}.O=C([O-])[O-].[K+].[K+]>>N({amine}){alkyl}"


def _bromination(pick: Picker) -> str:
    substrate = pick(SUBSTITUENTS)
    return f"{substrate}.O=C1CCC(=O)N1Br>>Br{substrate}"


def _amide_formation(pick: Picker) -> str:
    acyl, amine = pick(SUBSTITUENTS), pick(SUBSTITUENTS)
    return f"O=C(Cl){acyl}.N{amine}.CCN(CC)CC>>O=C({acyl})N{amine}"


TEMPLATES: Dict[str, Callable[[Picker], str]] = {
    "esterification": _esterification,
    "n_alkylation": _n_alkylation,
    "bromination": _bromination,
    "amide_formation": _amide_formation,
}


def template_schedule(n: int, rng: np.random.Generator) -> List[str]:
    """Template names in shuffled blocks, so counts differ by at most one."""
    names = list(TEMPLATES)
    schedule: List[str] = []
    while len(schedule) < n:
        block = list(names)
        rng.shuffle(block)
        schedule.extend(block)
    return schedule[:n]


def synth_templates(n: int, seed: int = 0) -> List[Reaction]:
    """Generate ``n`` template reactions labelled with their template name."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)

    def pick(pool: Tuple[str, ...]) -> str:
        return pool[int(rng.integers(len(pool)))]

    reactions = []
    for index, name in enumerate(template_schedule(n, rng)):
        smiles = TEMPLATES[name](pick)
        reactions.append(parse_reaction(smiles, f"synth-{index:05d}", class_label=name))

    logger.info("templates_generated", count=n, seed=seed)
    return reactions
