"""Configuration for the curve shortening flow package."""

import json
from pathlib import Path
from typing import Any

from pydantic_settings import BaseSettings, SettingsConfigDict

from csf.models.experiment import ExperimentConfig


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(env_prefix="CSF_", case_sensitive=False)

    # API settings
    api_title: str = "Curve Shortening Flow API"
    api_version: str = "1.0.0"
    api_description: str = "Evolve immersed plane curves and classify their singularities"

    # Server settings
    host: str = "127.0.0.1"
    port: int = 8000
    reload: bool = False

    # Runtime settings
    log_level: str = "INFO"
    output_dir: Path = Path("runs")
    max_stored_runs: int = 32


# Global settings instance
settings = Settings()


# Flat config-file keys and the nested model they belong to
FAMILY_KEYS = ("family", "lambda", "n_points", "radius", "a", "b")
SOLVER_KEYS = ("k_cap", "dt_min", "dt_max", "snapshot_stride", "max_steps", "safety")


def load_experiment_config(
    path: Path | None = None, overrides: dict[str, Any] | None = None
) -> ExperimentConfig:
    """Build an experiment config from a flat JSON file plus overrides.

    Overrides whose value is None are ignored, so unset CLI flags keep the
    file's values; anything still missing takes the model default.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})

    family = raw.pop("family", None)
    family_fields = dict(family) if isinstance(family, dict) else {"family": family}
    solver_fields = dict(raw.pop("solver", {}))
    for key in FAMILY_KEYS:
        if key in raw:
            family_fields[key] = raw.pop(key)
    for key in SOLVER_KEYS:
        if key in raw:
            solver_fields[key] = raw.pop(key)
    return ExperimentConfig.model_validate(
        {"family": family_fields, "solver": solver_fields, **raw}
    )
