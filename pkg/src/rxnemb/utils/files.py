"""File formats shared by the commands."""

import csv
import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Union

import numpy as np
import structlog

from ..core.errors import DataError

logger = structlog.get_logger()

EMBEDDING_MAGIC = b"RXNEMBV1"
_LE_FLOAT32 = np.dtype("<f4")

PathLike = Union[str, Path]


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def read_jsonl(path: PathLike) -> Iterator[Dict[str, Any]]:
    """Yield one mapping per non-blank line."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON ({e.msg})") from e
            if not isinstance(record, dict):
                raise DataError(f"{path}:{lineno}: expected a JSON object")
            yield record


def write_jsonl(path: PathLike, records: Iterable[Mapping[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    return path


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def write_json(path: PathLike, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


@dataclass
class EmbeddingSet:
    """Embedding matrix plus per-row metadata."""

    ids: List[str]
    vectors: np.ndarray
    skipped: int = 0
    rxn_smiles: List[str] = field(default_factory=list)
    labels: List[Optional[str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.ids):
            raise DataError(f"{len(self.ids)} ids for a matrix of shape {self.vectors.shape}")
        if not self.rxn_smiles:
            self.rxn_smiles = [""] * len(self.ids)
        if not self.labels:
            self.labels = [None] * len(self.ids)

    @property
    def count(self) -> int:
        return len(self.ids)

    @property
    def emb_dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def has_labels(self) -> bool:
        return any(label is not None for label in self.labels)


def write_embeddings(path: PathLike, embeddings: EmbeddingSet) -> Path:
    """JSON header followed by a little-endian float32 row-major matrix."""
    header = {
        "count": embeddings.count,
        "emb_dim": embeddings.emb_dim,
        "ids": embeddings.ids,
        "skipped": embeddings.skipped,
        "rxn_smiles": embeddings.rxn_smiles,
        "labels": embeddings.labels,
    }
    encoded = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    blob = np.ascontiguousarray(embeddings.vectors, dtype=_LE_FLOAT32).tobytes()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(EMBEDDING_MAGIC + struct.pack("<Q", len(encoded)) + encoded + blob)
    return path


def read_embeddings(path: PathLike) -> EmbeddingSet:
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file not found: {path}")
    payload = path.read_bytes()
    if payload[:8] != EMBEDDING_MAGIC or len(payload) < 16:
        raise DataError(f"{path} is not an embedding file")
    (header_len,) = struct.unpack("<Q", payload[8:16])
    try:
        header = json.loads(payload[16 : 16 + header_len].decode("utf-8"))
        count, dim = int(header["count"]), int(header["emb_dim"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, ValueError) as e:
        raise DataError(f"{path} has an unreadable header") from e

    blob = payload[16 + header_len :]
    if len(blob) != 4 * count * dim:
        raise DataError(f"{path}: expected {count}×{dim} floats, found {len(blob) // 4}")
    vectors = np.frombuffer(blob, dtype=_LE_FLOAT32).astype(np.float32).reshape(count, dim)
    return EmbeddingSet(
        ids=list(header["ids"]),
        vectors=vectors,
        skipped=int(header.get("skipped", 0)),
        rxn_smiles=list(header.get("rxn_smiles") or []),
        labels=list(header.get("labels") or []),
    )


def write_manifest(
    out_dir: PathLike,
    command: str,
    version: str,
    inputs: Sequence[PathLike],
    seed: int,
    config: Mapping[str, Any],
    outputs: Sequence[str] = (),
) -> Path:
    """Provenance record for a run; contains no timestamps."""
    manifest = {
        "command": command,
        "version": version,
        "seed": seed,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": sorted(outputs),
        "config": config,
    }
    path = write_json(Path(out_dir) / "manifest.json", manifest)
    logger.debug("manifest_written", path=str(path))
    return path
