"""Real/fictitious pre-training loop and evaluation."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.special import expit
from scipy.stats import rankdata

from ..autodiff import AdamState, Tape, adam_step, backward, ops
from ..core.errors import EmptySet, SingleClassCorpus, TooManyComponents
from ..core.types import EncoderConfig, TrainConfig
from ..encoder import ModelCheckpoint, PreparedReaction, forward, prepare_reaction
from ..utils.files import write_csv
from ..utils.workers import map_ordered
from .corpus import LabeledReaction

logger = structlog.get_logger()

HISTORY_COLUMNS = ("epoch", "train_loss", "val_loss", "val_acc")


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: Optional[float] = None
    val_acc: Optional[float] = None

    def row(self) -> Tuple[str, ...]:
        def fmt(value: Optional[float]) -> str:
            return "" if value is None else f"{value:.6f}"

        return (str(self.epoch), fmt(self.train_loss), fmt(self.val_loss), fmt(self.val_acc))


@dataclass
class CorpusSplit:
    train: List[LabeledReaction]
    val: List[LabeledReaction]
    test: List[LabeledReaction]

    @property
    def sizes(self) -> Dict[str, int]:
        return {"train": len(self.train), "val": len(self.val), "test": len(self.test)}


@dataclass
class TrainResult:
    """Best checkpoint plus everything needed to report on the run."""

    checkpoint: ModelCheckpoint
    history: List[EpochRecord]
    split_sizes: Dict[str, int]
    best_epoch: int
    test_metrics: Dict[str, Optional[float]] = field(default_factory=dict)
    skipped: int = 0


def _split_counts(n: int, val_fraction: float, test_fraction: float) -> Tuple[int, int]:
    n_val = int(round(n * val_fraction))
    n_test = int(round(n * test_fraction))
    # keep every held-out split populated once a class has a few members
    if n >= 3:
        if val_fraction > 0 and n_val == 0:
            n_val = 1
        if test_fraction > 0 and n_test == 0:
            n_test = 1
    n_val = min(n_val, max(n - 1, 0))
    n_test = min(n_test, max(n - 1 - n_val, 0))
    return n_val, n_test


def split_corpus(corpus: Sequence[LabeledReaction], config: TrainConfig) -> CorpusSplit:
    """Stratified train/val/test split; each part keeps corpus order."""
    rng = np.random.default_rng(config.seed)
    parts: Dict[str, List[int]] = {"train": [], "val": [], "test": []}
    for is_real in (True, False):
        members = np.array([i for i, entry in enumerate(corpus) if entry.is_real is is_real], dtype=np.int64)
        if members.size == 0:
            continue
        members = members[rng.permutation(members.size)]
        n_val, n_test = _split_counts(members.size, config.val_fraction, config.test_fraction)
        parts["val"].extend(members[:n_val].tolist())
        parts["test"].extend(members[n_val : n_val + n_test].tolist())
        parts["train"].extend(members[n_val + n_test :].tolist())
    return CorpusSplit(*[[corpus[i] for i in sorted(parts[name])] for name in ("train", "val", "test")])


def auroc(scores: Sequence[float], labels: Sequence[bool]) -> Optional[float]:
    """Area under the ROC curve from the Mann-Whitney rank statistic.

    Ties get average ranks, so a constant score gives 0.5. Returns None when
    only one class is present.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(labels, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def _logits(model: ModelCheckpoint, prepared: Sequence[PreparedReaction], batch_size: int) -> np.ndarray:
    params = model.tensors()
    out = []
    for start in range(0, len(prepared), batch_size):
        _, logits = forward(params, model.config, prepared[start : start + batch_size])
        out.append(logits.data.reshape(-1).astype(np.float64))
    return np.concatenate(out) if out else np.zeros(0)


def _bce(logits: np.ndarray, targets: np.ndarray) -> float:
    losses = np.maximum(logits, 0) - logits * targets + np.log1p(np.exp(-np.abs(logits)))
    return float(losses.mean())


def _accuracy(logits: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean((expit(logits) >= 0.5) == (targets > 0.5)))


def evaluate(
    model: ModelCheckpoint, labeled: Sequence[LabeledReaction], batch_size: int = 64
) -> Dict[str, Optional[float]]:
    """Accuracy at p(real) ≥ 0.5 and AUROC over a labelled set."""
    if not labeled:
        raise EmptySet("cannot evaluate on an empty set")
    prepared = [prepare_reaction(entry.reaction, model.config, model.dtype) for entry in labeled]
    targets = np.array([entry.is_real for entry in labeled], dtype=np.float64)
    logits = _logits(model, prepared, batch_size)
    return {
        "accuracy": _accuracy(logits, targets),
        "auroc": auroc(expit(logits), targets > 0.5),
        "loss": _bce(logits, targets),
    }


class Trainer:
    """Trains the encoder to tell real reactions from fictitious ones."""

    def __init__(self, encoder_config: EncoderConfig, train_config: TrainConfig, workers: int = 1):
        self.encoder_config = encoder_config
        self.config = train_config
        self.workers = workers
        self._logger = logger.bind(component="Trainer")

    def _prepare(self, entries: Sequence[LabeledReaction]) -> Tuple[List[PreparedReaction], np.ndarray, int]:
        def one(entry: LabeledReaction) -> Optional[PreparedReaction]:
            try:
                return prepare_reaction(entry.reaction, self.encoder_config)
            except TooManyComponents as e:
                self._logger.warning("reaction_skipped", reaction=entry.reaction.id, reason=str(e))
                return None

        prepared = map_ordered(one, entries, self.workers)
        kept = [(p, entry.is_real) for p, entry in zip(prepared, entries) if p is not None]
        targets = np.array([is_real for _, is_real in kept], dtype=np.float64)
        return [p for p, _ in kept], targets, len(entries) - len(kept)

    def _measure(
        self, model: ModelCheckpoint, prepared: Sequence[PreparedReaction], targets: np.ndarray
    ) -> Tuple[Optional[float], Optional[float]]:
        if not prepared:
            return None, None
        logits = _logits(model, prepared, max(self.config.batch_size, 64))
        return _bce(logits, targets), _accuracy(logits, targets)

    def _step(
        self, model: ModelCheckpoint, batch: Sequence[PreparedReaction], targets: np.ndarray, state: AdamState
    ) -> Tuple[ModelCheckpoint, AdamState, float]:
        with Tape() as tape:
            params = model.tensors(requires_grad=True)
            _, logits = forward(params, model.config, batch)
            loss = ops.bce_with_logits(logits, targets)
        grads = backward(tape, loss, params)
        updated, state = adam_step(
            model.parameters,
            grads,
            state,
            lr=self.config.lr,
            beta1=self.config.beta1,
            beta2=self.config.beta2,
            eps=self.config.adam_eps,
        )
        return model.with_parameters(updated), state, loss.item()

    def fit(self, corpus: Sequence[LabeledReaction]) -> TrainResult:
        classes = {entry.is_real for entry in corpus}
        if len(classes) < 2:
            kinds = sorted("real" if c else "fictitious" for c in classes) or ["no"]
            raise SingleClassCorpus(f"training needs real and fictitious reactions, corpus has {kinds[0]} entries only")

        split = split_corpus(corpus, self.config)
        train_set, train_y, skipped_train = self._prepare(split.train)
        val_set, val_y, skipped_val = self._prepare(split.val)
        if len(set(train_y.tolist())) < 2:
            raise SingleClassCorpus("training split lost one class after skipping reactions")
        self._logger.info("training_started", **split.sizes, epochs=self.config.epochs)

        rng = np.random.default_rng(self.config.seed)
        model = ModelCheckpoint.init(self.encoder_config, seed=self.config.seed)
        state = AdamState()

        train_loss, _ = self._measure(model, train_set, train_y)
        val_loss, val_acc = self._measure(model, val_set, val_y)
        history = [EpochRecord(0, train_loss, val_loss, val_acc)]
        best, best_epoch, best_acc, stale = model, 0, val_acc, 0

        for epoch in range(1, self.config.epochs + 1):
            order = rng.permutation(len(train_set))
            batch_losses = []
            for start in range(0, len(order), self.config.batch_size):
                index = order[start : start + self.config.batch_size]
                model, state, loss = self._step(model, [train_set[i] for i in index], train_y[index], state)
                batch_losses.append(loss)

            train_loss, _ = self._measure(model, train_set, train_y)
            val_loss, val_acc = self._measure(model, val_set, val_y)
            history.append(EpochRecord(epoch, train_loss, val_loss, val_acc))
            self._logger.info(
                "epoch_completed",
                epoch=epoch,
                batch_loss=float(np.mean(batch_losses)),
                train_loss=train_loss,
                val_loss=val_loss,
                val_acc=val_acc,
            )

            if val_acc is None:
                best, best_epoch = model, epoch
                continue
            if best_acc is None or val_acc > best_acc:
                best, best_epoch, best_acc, stale = model, epoch, val_acc, 0
                continue
            stale += 1
            if stale >= self.config.patience:
                self._logger.info("early_stopped", epoch=epoch, best_epoch=best_epoch, best_val_acc=best_acc)
                break

        test_metrics = evaluate(best, split.test) if split.test else {}
        self._logger.info("training_completed", best_epoch=best_epoch, **test_metrics)
        return TrainResult(
            checkpoint=best,
            history=history,
            split_sizes=split.sizes,
            best_epoch=best_epoch,
            test_metrics=test_metrics,
            skipped=skipped_train + skipped_val,
        )


def train(
    corpus: Sequence[LabeledReaction],
    encoder_config: Optional[EncoderConfig] = None,
    train_config: Optional[TrainConfig] = None,
    workers: int = 1,
) -> TrainResult:
    return Trainer(encoder_config or EncoderConfig(), train_config or TrainConfig(), workers).fit(corpus)


def write_history(path: Union[str, Path], history: Sequence[EpochRecord]) -> Path:
    return write_csv(path, HISTORY_COLUMNS, (record.row() for record in history))
