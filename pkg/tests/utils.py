"""Test utilities, reference reactions and brute-force oracles."""

import itertools
import json
import math
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from rxnemb.autodiff import Tape, Tensor, backward, gradient_check
from rxnemb.chem import Reaction, parse_reaction
from rxnemb.cluster.ordering import Dendrogram


# Patent-style reaction records, stereo and
# agents kept as written. Several are long multi-component records.
REFERENCE_REACTIONS: List[str] = [
    "O=C(O)c1ccccc1.[Cl-]>>O=C(Cl)c1ccccc1",
    "CCO.CN(c1ccnc2[nH]ccc12)C1CCCN(Cc2ccccc2)C1.Cl.O.[H][H].[OH-].[OH-].[Pd+2]"
    ">>CN(c1ccnc2[nH]ccc12)C1CCCNC1.Cl.Cl.Cl",
    "CC(=O)O.CC(=O)OC(C)=O.O=C(O)c1cccc2c1OCCO2.O=[N+]([O-])O>>O=C(O)c1cc([N+](=O)[O-])cc2c1OCCO2",
    "CO.COc1ccc(O)c(C)c1C.Cc1c(O)ccc(O)c1C.Cc1cc(O)ccc1O.[Zn]>>COc1c(C)cc(O)c(C)c1C",
    "O=Cc1cc2cc(OCc3ccccc3)ccc2n1S(=O)(=O)c1ccccc1.O=S(=O)(Cl)Cl"
    ">>O=Cc1cc2c(Cl)c(OCc3ccccc3)ccc2n1S(=O)(=O)c1ccccc1",
    "CC1OC(CBr)OC1C.CCCOc1ccccc1N.O=C([O-])[O-].[Na+].[Na+]>>CCCOc1ccccc1NCC1OC(C)C(C)O1",
    "CCCCCCCCCCO.COC(=O)OC.[Al].[Mg]>>CCCCCCCCCCOC",
    "C1CCOC1.O.O=C(C1CC1)N1CCNCC1.[Al+3].[H-].[H-].[H-].[H-].[Li+].[Na+].[OH-]>>C1CN(CC2CC2)CCN1",
    "CCCN(CCC)CCC.O=P(Cl)(Cl)Cl.Oc1nc2cc(F)ccc2n2cnnc12>>Fc1ccc2c(c1)nc(Cl)c1nncn12",
    "C1CCOC1.CC(C)(C)OC(=O)[C@@H]1CCC(=O)N1C(=O)OC(C)(C)C.CI.C[Si](C)(C)[N-][Si](C)(C)C.[Li+]"
    ">>CC1C[C@@H](C(=O)OC(C)(C)C)N(C(=O)OC(C)(C)C)C1=O",
    "C1CCOC1.C1CCOC1.O.O=C(O)C(Br)c1ccccc1>>OCC(Br)c1ccccc1",
    "C=CCC(O)CC(O)c1cccc(Br)c1.ClCCl>>C=CCC(O)CC(=O)c1cccc(Br)c1",
    "CC(C)(C#N)N=NC(C)(C)C#N.Cc1ccc(-c2ccccc2N([SH](=O)=O)C(C)(C)C)cc1.ClC(Cl)(Cl)Cl.O=C1CCC(=O)N1Br"
    ">>CC(C)(C)N(c1ccccc1-c1ccc(CBr)cc1)[SH](=O)=O",
    "CN(C)C=O.CO.COC(=O)C12CCC(C(=O)O)(CC1)CC2.Cc1c(O)cccc1Br.ClCCl.ClCCl.O=C(Cl)C(=O)Cl"
    ">>COC(=O)C12CCC(C(=O)Cl)(CC1)CC2",
    "CC(C)(C)[Si](C)(C)O[C@@H]1CO[C@H]2[C@@H]1OC[C@H]2O.ClCCl"
    ">>CC(C)(C)[Si](C)(C)O[C@@H]1CO[C@@H]2C(=O)CO[C@@H]21",
    "CC#N.CCCOc1nc(Cl)ccc1C(N)=O.NC(=O)c1ccc(Cl)nc1Cl.[H-].[Na+]>>CC(C)COc1nc(Cl)ccc1C(N)=O",
    "O=C(Cl)C(=O)Cl.O=[N+]([O-])C12C3C4C1C1C2C3C41[N+](=O)[O-]"
    ">>O=[N+]([O-])C12C3C4C1C1(Cl)C2C3C41[N+](=O)[O-]",
    "CC(C)O.CCOCC.O=C(Cl)OCCl.c1ccncc1>>CC(C)OC(=O)OCCl",
    "CC(C)(C)C(C)(C)CO.ClCCl.O=[Cr](=O)([O-])Cl.c1cc[nH+]cc1>>CC(C)(C)C(C)(C)C=O",
    "CO.C[O-].Cl.O=C(CBr)c1ccc(O)cc1.[Na+]>>COCC(=O)c1ccc(O)cc1",
    "C1CCOC1.CCN1CCC(C)(C)c2cc(C(C)C)cc(C=O)c21.C[Mg+].[Br-]>>CCCN1CCC(C)(C)c2cc(C(C)C)cc(C=O)c21",
    "CC(C)(C)c1cc(=C2CCCCC2)c(=C2CCCCC2)c2c1OC(=O)C2O.ClCCl"
    ">>CC(C)(C)c1cc(=C2CCCCC2)c(=C2CCCCC2)c2c1OC(=O)C2=O",
    "C1=COCCC1.C1CCOC1.CO.Cl.ClC1CCCCO1.[H-].[Na+].c1c[nH]cn1>>c1cn(C2CCCCO2)cn1",
    "CCC=CCC=CCC=CCCCCCCCC(=O)O.ClC(Cl)Cl.O=C(Cl)C(=O)Cl>>CCC=CCC=CCC=CCCCCCCCC(=O)Cl",
    "Nc1[nH]c(=O)[nH]c(=O)c1Br.Nc1ccccc1S.O=C([O-])[O-].OCCO.[K+].[K+]>>Nc1ccccc1Sc1c(N)[nH]c(=O)[nH]c1=O",
    "C[NH3+].Cc1c(C=O)cc(-c2ccccc2)n1S(=O)(=O)c1ccccc1.[BH3-]C#N.[Cl-].[Na+]"
    ">>CNCc1cc(-c2ccccc2)n(S(=O)(=O)c2ccccc2)c1C.Cl",
    "C=C/C=C\\[C@H](C)[C@H](OC(N)=O)[C@@H](C)CO.ClCCl>>C=C/C=C\\[C@H](C)[C@H](OC(N)=O)[C@@H](C)C=O",
    "CC(C)Cc1ccccc1.ClBr.O=S=O.Oc1cccc(O)c1>>CC(C)Cc1ccc(Br)cc1.CC(C)Cc1ccccc1",
    "C1CCOC1.CC(C)(C)C(=O)Nc1ccc(C(F)(F)F)cc1.CCCCCC.CI.O>>Cc1cc(C(F)(F)F)ccc1NC(=O)C(C)(C)C",
    "CC1COC(=O)O1.O=C1CCC(=O)N1Br.c1ccc2c(c1)Cc1ccccc1-2>>Brc1ccc2c(c1)Cc1ccccc1-2",
]


def reference_reactions() -> List[Reaction]:
    return [parse_reaction(s, f"ref-{i}") for i, s in enumerate(REFERENCE_REACTIONS)]


def write_reaction_file(
    path: Path,
    smiles: Sequence[str],
    labels: Optional[Sequence[Optional[str]]] = None,
    ids: Optional[Sequence[str]] = None,
) -> Path:
    """Write reactions as JSON Lines records."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for i, s in enumerate(smiles):
            record = {"id": ids[i] if ids else f"r{i}", "rxn_smiles": s}
            if labels is not None and labels[i] is not None:
                record["label"] = labels[i]
            f.write(json.dumps(record) + "\n")
    return path


def make_blobs(
    centers: Sequence[Sequence[float]], per_blob: int, scale: float = 0.1, seed: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """Isotropic Gaussian blobs and their integer labels."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    points = np.vstack([c + scale * rng.standard_normal((per_blob, centers.shape[1])) for c in centers])
    labels = np.repeat(np.arange(len(centers)), per_blob)
    return points, labels


# --- oracles ----------------------------------------------------------------


def brute_force_kennard_stone(D: np.ndarray, k: int) -> List[int]:
    """Max-min selection written as plain loops over the full distance matrix."""
    n = len(D)
    best = None
    for i in range(n):
        for j in range(n):
            if best is None or D[i, j] > D[best[0], best[1]]:
                best = (i, j)
    chosen = [best[0], best[1]]
    while len(chosen) < k:
        pick, pick_score = None, -1.0
        for c in range(n):
            if c in chosen:
                continue
            score = min(D[c, s] for s in chosen)
            if score > pick_score:
                pick, pick_score = c, score
        chosen.append(pick)
    return chosen


def brute_force_assign(D: np.ndarray, centroids: Sequence[int]) -> List[int]:
    labels = []
    for i in range(len(D)):
        best, best_d = 0, math.inf
        for c, idx in enumerate(centroids):
            if D[i, idx] < best_d:
                best, best_d = c, D[i, idx]
        labels.append(best)
    for c, idx in enumerate(centroids):
        labels[idx] = c
    return labels


def exhaustive_leaf_orders(tree: Dendrogram, node: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Every leaf order reachable by flipping internal nodes."""
    if node is None:
        node = tree.n_leaves + len(tree.merges) - 1
    if node < tree.n_leaves:
        return [(node,)]
    left, right = tree.children(node)
    orders = []
    for a in exhaustive_leaf_orders(tree, left):
        for b in exhaustive_leaf_orders(tree, right):
            orders.append(a + b)
            orders.append(b + a)
    return orders


def order_cost(D: np.ndarray, order: Sequence[int]) -> float:
    return math.fsum(float(D[a, b]) for a, b in zip(order, order[1:]))


def best_exhaustive_order(tree: Dendrogram, D: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    return min((order_cost(D, o), o) for o in set(exhaustive_leaf_orders(tree)))


def brute_force_knn(X: np.ndarray, k: int) -> np.ndarray:
    n = len(X)
    out = np.zeros((n, k), dtype=int)
    for i in range(n):
        d = [(float(np.linalg.norm(X[i] - X[j])), j) for j in range(n) if j != i]
        out[i] = [j for _, j in sorted(d)[:k]]
    return out


def all_pairs_auroc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Fraction of (positive, negative) pairs ranked correctly; ties count half."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p, q in itertools.product(pos, neg):
        total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def read_json(path: Path):
    with open(path) as f:
        return json.load(f)


def read_lines(path: Path) -> List[str]:
    return Path(path).read_text().splitlines()


def flatten(items: Iterable[Iterable]) -> list:
    return [x for group in items for x in group]


# A bias added to every logit of a softmax row cancels out, so these
# parameters have an exactly zero true gradient.
SHIFT_INVARIANT_SUFFIXES = ("attn.k.bias", "pool.gate.bias")


def check_model_gradients(
    loss: Callable,
    params: Mapping[str, np.ndarray],
    step: float = 1e-3,
    tolerance: float = 1e-4,
    max_entries: Optional[int] = None,
    seed: int = 0,
) -> Dict[str, float]:
    """Assert backward matches central differences for every parameter.

    A parameter over ``tolerance`` at ``step`` must pass at ``step / 10``
    with its error down at least 20-fold, which is how truncation error of
    a central difference behaves (it scales with step²). Shift-invariant
    biases are checked absolutely instead. Returns the errors at ``step``.
    """
    checked = [n for n in params if not n.endswith(SHIFT_INVARIANT_SUFFIXES)]
    zero = [n for n in params if n.endswith(SHIFT_INVARIANT_SUFFIXES)]

    errors = gradient_check(loss, params, step=step, max_entries=max_entries, seed=seed, names=checked)
    over = [n for n in checked if errors[n] >= tolerance]
    if over:
        finer = gradient_check(loss, params, step=step / 10, max_entries=max_entries, seed=seed, names=over)
        for name in over:
            assert finer[name] < tolerance, f"{name}: {errors[name]:.2e} at {step}, {finer[name]:.2e} at {step / 10}"
            assert finer[name] <= errors[name] / 20, f"{name}: error does not shrink with the step"

    with Tape() as tape:
        tracked = {n: Tensor(v, requires_grad=True, name=n, dtype=np.float64) for n, v in params.items()}
        value = loss(tracked)
    grads = backward(tape, value, tracked)
    for name in zero:
        assert np.abs(grads[name]).max() < 1e-10, f"{name} should have no gradient"
    if zero:
        numeric = gradient_check(loss, params, step=step, names=zero)
        assert max(numeric.values()) == 0.0
    return errors
