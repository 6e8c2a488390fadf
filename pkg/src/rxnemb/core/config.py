"""Configuration management for RXNEmb."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import structlog
import yaml
from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from .errors import ConfigError
from .types import PipelineConfig

logger = structlog.get_logger()

# env var -> (dotted config key, converter)
ENV_MAPPING = {
    "RXNEMB_THREADS": ("threads", int),
    "RXNEMB_LOG_LEVEL": ("log_level", str),
    "RXNEMB_SEED": ("seed", int),
    "RXNEMB_OUTPUT_DIR": ("output_dir", Path),
}


class ConfigManager:
    """Loads, overrides and persists a PipelineConfig."""

    def __init__(self, config_path: Optional[Union[str, Path]] = None, use_env: bool = True):
        self.config_path = Path(config_path) if config_path is not None else None
        self.use_env = use_env
        self._config: Optional[PipelineConfig] = None
        self._logger = logger.bind(component="ConfigManager")

        if use_env:
            load_dotenv(find_dotenv(usecwd=True))

    def load(self) -> PipelineConfig:
        """Load configuration from file, then environment."""
        if self._config is not None:
            return self._config

        config_data: Dict[str, Any] = {}
        if self.config_path is not None:
            if not self.config_path.exists():
                raise ConfigError(f"config file not found: {self.config_path}")
            config_data = self._load_from_file(self.config_path)

        if self.use_env:
            config_data = self._merge_with_env(config_data)

        self._config = self._validate(config_data)
        self._logger.debug("configuration_loaded", source=str(self.config_path))
        return self._config

    def update(self, updates: Dict[str, Any]) -> PipelineConfig:
        """Apply nested overrides (e.g. from CLI flags) and revalidate."""
        if self._config is None:
            self.load()

        config_data = self._config.model_dump(mode="python")
        self._deep_update(config_data, {k: v for k, v in updates.items() if v is not None})
        self._config = self._validate(config_data)
        self._logger.debug("configuration_updated", keys=sorted(updates))
        return self._config

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value by dot-notation key."""
        value: Any = self.load().model_dump(mode="json")
        for part in key.split("."):
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                return default
        return value

    def dump(self, fmt: str = "yaml") -> str:
        """Serialize the resolved configuration."""
        data = self.load().model_dump(mode="json")
        if fmt == "json":
            return json.dumps(data, indent=2, sort_keys=True) + "\n"
        return yaml.safe_dump(data, default_flow_style=False, sort_keys=True)

    def save(self, path: Path) -> Path:
        """Write the resolved configuration; format follows the suffix."""
        fmt = "json" if path.suffix == ".json" else "yaml"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dump(fmt))
        self._logger.debug("configuration_saved", path=str(path))
        return path

    def _validate(self, data: Dict[str, Any]) -> PipelineConfig:
        try:
            return PipelineConfig(**data)
        except ValidationError as e:
            self._logger.error("configuration_validation_failed", errors=e.errors())
            first = e.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            raise ConfigError(f"invalid configuration at '{where}': {first['msg']}") from e

    def _load_from_file(self, path: Path) -> Dict[str, Any]:
        content = path.read_text()
        try:
            if path.suffix == ".json":
                data = json.loads(content)
            else:
                data = yaml.safe_load(content)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot parse config file {path}: {e}") from e

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must contain a mapping")
        return data

    def _merge_with_env(self, config_data: Dict[str, Any]) -> Dict[str, Any]:
        for env_var, (config_key, convert) in ENV_MAPPING.items():
            value = os.getenv(env_var)
            if value is None:
                continue
            try:
                converted = convert(value)
            except ValueError as e:
                raise ConfigError(f"{env_var}={value!r} is not valid") from e

            parts = config_key.split(".")
            current = config_data
            for part in parts[:-1]:
                current = current.setdefault(part, {})
            current[parts[-1]] = converted

        return config_data

    def _deep_update(self, base: Dict[str, Any], updates: Dict[str, Any]) -> None:
        for key, value in updates.items():
            if isinstance(value, dict) and isinstance(base.get(key), dict):
                self._deep_update(base[key], value)
            else:
                base[key] = value


def load_config(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    use_env: bool = True,
) -> ConfigManager:
    """Build a manager, load it and apply overrides in one call."""
    manager = ConfigManager(config_path, use_env=use_env)
    manager.load()
    if overrides:
        manager.update(overrides)
    return manager
