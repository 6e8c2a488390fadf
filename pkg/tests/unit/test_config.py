"""Unit tests for configuration loading and overrides."""

import json
from pathlib import Path

import pytest
import yaml

from rxnemb.core.config import ConfigManager, load_config
from rxnemb.core.errors import ConfigError
from rxnemb.core.types import EncoderConfig, JKMode, Metric, PipelineConfig, TrainConfig


class TestPipelineConfig:
    """Test configuration models."""

    def test_defaults(self):
        """Test the stock architecture and pipeline settings."""
        config = PipelineConfig()

        assert config.encoder.gnn_layers == 4
        assert config.encoder.tf_layers == 4
        assert config.encoder.jk_mode is JKMode.CONCAT_PROJECT
        assert config.cluster.k == 50
        assert config.cluster.metric is Metric.EUCLIDEAN
        assert config.projection.n_neighbors == 15
        assert config.threads == 1

    def test_heads_must_divide_model_width(self):
        """Test d_model is split evenly across heads."""
        with pytest.raises(ValueError):
            EncoderConfig(d_model=10, tf_heads=4)

    def test_split_fractions_sum_to_one(self):
        """Test train, val and test fractions cover the corpus."""
        with pytest.raises(ValueError):
            TrainConfig(train_fraction=0.7, val_fraction=0.1, test_fraction=0.1)

    def test_unknown_key_rejected(self):
        """Test typos are errors, not silently ignored."""
        with pytest.raises(ValueError):
            PipelineConfig(clustr={"k": 3})


class TestConfigManager:
    """Test ConfigManager class."""

    def test_defaults_without_file(self, no_dotenv):
        """Test loading with no file and no environment."""
        config = ConfigManager().load()

        assert config == PipelineConfig()

    def test_yaml_file(self, no_dotenv):
        """Test nested sections are read from YAML."""
        path = no_dotenv / "config.yaml"
        path.write_text(yaml.safe_dump({"seed": 9, "cluster": {"k": 7, "metric": "cosine"}}))

        config = ConfigManager(path).load()

        assert config.seed == 9
        assert config.cluster.k == 7
        assert config.cluster.metric is Metric.COSINE

    def test_json_file(self, no_dotenv):
        """Test JSON files are accepted by suffix."""
        path = no_dotenv / "config.json"
        path.write_text(json.dumps({"projection": {"min_dist": 0.25}}))

        assert ConfigManager(path).load().projection.min_dist == 0.25

    def test_environment_overrides_file(self, no_dotenv, monkeypatch):
        """Test RXNEMB_* variables win over the file."""
        path = no_dotenv / "config.yaml"
        path.write_text(yaml.safe_dump({"seed": 1, "threads": 2}))
        monkeypatch.setenv("RXNEMB_SEED", "42")
        monkeypatch.setenv("RXNEMB_OUTPUT_DIR", "elsewhere")

        config = ConfigManager(path).load()

        assert config.seed == 42
        assert config.threads == 2
        assert config.output_dir == Path("elsewhere")

    def test_dotenv_file(self, no_dotenv):
        """Test a .env file in the working directory is honoured."""
        (no_dotenv / ".env").write_text("RXNEMB_THREADS=3\n")

        assert ConfigManager().load().threads == 3

    def test_environment_ignored_when_disabled(self, no_dotenv, monkeypatch):
        """Test use_env=False skips the environment."""
        monkeypatch.setenv("RXNEMB_SEED", "42")

        assert ConfigManager(use_env=False).load().seed == 0

    def test_invalid_environment_value(self, no_dotenv, monkeypatch):
        """Test a non-integer thread count."""
        monkeypatch.setenv("RXNEMB_THREADS", "many")

        with pytest.raises(ConfigError):
            ConfigManager().load()

    def test_missing_file(self, no_dotenv):
        """Test a named config file must exist."""
        with pytest.raises(ConfigError):
            ConfigManager(no_dotenv / "absent.yaml").load()

    def test_not_a_mapping(self, no_dotenv):
        """Test the top level must be a mapping."""
        path = no_dotenv / "config.yaml"
        path.write_text("- 1\n- 2\n")

        with pytest.raises(ConfigError):
            ConfigManager(path).load()

    def test_unknown_key_in_file(self, no_dotenv):
        """Test the error names the offending location."""
        path = no_dotenv / "config.yaml"
        path.write_text(yaml.safe_dump({"cluster": {"kk": 3}}))

        with pytest.raises(ConfigError, match="cluster.kk"):
            ConfigManager(path).load()

    def test_update(self, no_dotenv):
        """Test nested overrides merge and None values are ignored."""
        manager = ConfigManager()

        config = manager.update({"cluster": {"k": 5}, "seed": None, "encoder": {"emb_dim": 32}})

        assert config.cluster.k == 5
        assert config.cluster.metric is Metric.EUCLIDEAN
        assert config.seed == 0
        assert config.encoder.emb_dim == 32

    def test_update_revalidates(self, no_dotenv):
        """Test overrides go through validation."""
        with pytest.raises(ConfigError):
            ConfigManager().update({"cluster": {"k": 1}})

    def test_get(self, no_dotenv):
        """Test dotted lookups and defaults."""
        manager = ConfigManager()

        assert manager.get("projection.n_neighbors") == 15
        assert manager.get("cluster.metric") == "euclidean"
        assert manager.get("cluster.missing", "fallback") == "fallback"

    def test_save_and_reload(self, no_dotenv):
        """Test a saved config loads back to the same values."""
        manager = load_config(overrides={"cluster": {"k": 11}}, use_env=False)

        yaml_path = manager.save(no_dotenv / "out" / "config.yaml")
        json_path = manager.save(no_dotenv / "out" / "config.json")

        assert ConfigManager(yaml_path, use_env=False).load() == manager.load()
        assert json.loads(json_path.read_text())["cluster"]["k"] == 11

    def test_dump_sorted(self, no_dotenv):
        """Test YAML output is stable."""
        manager = ConfigManager(use_env=False)

        assert manager.dump() == ConfigManager(use_env=False).dump()
        assert list(yaml.safe_load(manager.dump())) == sorted(PipelineConfig.model_fields)
