"""Shared pytest configuration and fixtures."""

import tempfile
from pathlib import Path
from typing import Generator, List

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from rxnemb.chem import Reaction, parse_reaction
from rxnemb.core.types import EncoderConfig, PipelineConfig
from rxnemb.encoder import ModelCheckpoint


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def no_dotenv(temp_dir, monkeypatch) -> Path:
    """Run from an empty directory with no RXNEMB_* variables set."""
    for name in ("RXNEMB_THREADS", "RXNEMB_LOG_LEVEL", "RXNEMB_SEED", "RXNEMB_OUTPUT_DIR"):
        # setenv first so teardown also removes values a .env file loads
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    monkeypatch.chdir(temp_dir)
    return temp_dir


@pytest.fixture
def small_encoder_config() -> EncoderConfig:
    """Narrow encoder that keeps forward passes fast."""
    return EncoderConfig(
        gnn_hidden=8,
        gnn_layers=2,
        d_model=8,
        tf_layers=2,
        tf_heads=2,
        ffn_dim=16,
        emb_dim=8,
    )


@pytest.fixture
def random_model(small_encoder_config) -> ModelCheckpoint:
    """Untrained model with seeded weights."""
    return ModelCheckpoint.init(small_encoder_config, seed=3)


@pytest.fixture
def sample_reactions() -> List[Reaction]:
    """A handful of small, valid reactions."""
    smiles = [
        "CCO.CC(=O)O>>CC(=O)OCC",
        "CN.CCBr>>CCNC",
        "c1ccccc1.BrBr>>Brc1ccccc1",
        "O=C(O)c1ccccc1.[Cl-]>>O=C(Cl)c1ccccc1",
        "CCCCO>>CCCC=O",
        "NCCBr.N>>NCCN",
    ]
    return [parse_reaction(s, f"rxn-{i}") for i, s in enumerate(smiles)]


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner."""
    return CliRunner()


@pytest.fixture
def small_config_file(temp_dir, small_encoder_config) -> Path:
    """YAML config with a narrow encoder and a short training run."""
    config = PipelineConfig(
        encoder=small_encoder_config,
        train={"epochs": 2, "batch_size": 8, "lr": 3e-3, "patience": 2},
        cluster={"k": 3},
        projection={"n_neighbors": 4, "n_epochs": 50},
    )
    path = temp_dir / "config.yaml"
    path.write_text(yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False))
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data."""
    return np.random.default_rng(1234)
