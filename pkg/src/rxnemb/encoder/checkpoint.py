"""Checkpoint file format.

Layout: 8-byte magic, little-endian uint64 manifest length, UTF-8 JSON
manifest (config, seed, tensor index), then one little-endian float32 blob.
"""

import json
import struct
from pathlib import Path
from typing import Union

import numpy as np
import structlog
from pydantic import ValidationError

from ..core.errors import CheckpointError
from ..core.types import EncoderConfig
from .model import ModelCheckpoint

logger = structlog.get_logger()

MAGIC = b"RXNEMB01"
FORMAT_VERSION = 1
_LE_FLOAT32 = np.dtype("<f4")


def checkpoint_bytes(model: ModelCheckpoint) -> bytes:
    index = []
    blobs = []
    offset = 0
    for name, value in model.parameters.items():
        data = np.ascontiguousarray(value, dtype=_LE_FLOAT32).tobytes()
        index.append({"name": name, "shape": list(value.shape), "offset": offset, "nbytes": len(data)})
        blobs.append(data)
        offset += len(data)

    manifest = {
        "format_version": FORMAT_VERSION,
        "config": model.config.model_dump(mode="json"),
        "rng_seed": model.rng_seed,
        "tensors": index,
    }
    header = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return MAGIC + struct.pack("<Q", len(header)) + header + b"".join(blobs)


def save_checkpoint(model: ModelCheckpoint, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = checkpoint_bytes(model)
    path.write_bytes(payload)
    logger.info("checkpoint_saved", path=str(path), tensors=len(model.parameters), bytes=len(payload))
    return path


def load_checkpoint(path: Union[str, Path]) -> ModelCheckpoint:
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    return parse_checkpoint(payload, source=str(path))


def parse_checkpoint(payload: bytes, source: str = "<bytes>") -> ModelCheckpoint:
    if len(payload) < 16 or payload[:8] != MAGIC:
        raise CheckpointError(f"{source} is not an RXNEmb checkpoint")
    (header_len,) = struct.unpack("<Q", payload[8:16])
    body_start = 16 + header_len
    if body_start > len(payload):
        raise CheckpointError(f"{source} is truncated")

    try:
        manifest = json.loads(payload[16:body_start].decode("utf-8"))
        config = EncoderConfig(**manifest["config"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValidationError) as e:
        raise CheckpointError(f"{source} has an unreadable manifest: {e}") from e
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{source} has unsupported format version {manifest.get('format_version')}")

    blob = payload[body_start:]
    parameters = {}
    for entry in manifest["tensors"]:
        start, nbytes = entry["offset"], entry["nbytes"]
        shape = tuple(entry["shape"])
        if start + nbytes > len(blob) or nbytes != 4 * int(np.prod(shape, dtype=np.int64)):
            raise CheckpointError(f"{source}: tensor {entry['name']} exceeds the blob")
        array = np.frombuffer(blob, dtype=_LE_FLOAT32, count=nbytes // 4, offset=start)
        parameters[entry["name"]] = array.astype(np.float32).reshape(shape)

    return ModelCheckpoint(config, parameters, int(manifest.get("rng_seed", 0)))
