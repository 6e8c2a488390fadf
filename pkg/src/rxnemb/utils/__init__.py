"""Utility functions for RXNEmb."""

from .files import (
    EmbeddingSet,
    read_csv,
    read_embeddings,
    read_jsonl,
    sha256_file,
    write_csv,
    write_embeddings,
    write_json,
    write_jsonl,
    write_manifest,
)
from .workers import map_ordered

__all__ = [
    "EmbeddingSet",
    "map_ordered",
    "read_csv",
    "read_embeddings",
    "read_jsonl",
    "sha256_file",
    "write_csv",
    "write_embeddings",
    "write_json",
    "write_jsonl",
    "write_manifest",
]
