"""
Run configuration: CLI flags over QCURVE_* environment variables over defaults.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional

from core.descent import DEFAULT_TRIAL_LIMIT
from core.elliptic import DEFAULT_POINT_LIMIT

logger = logging.getLogger("qcurve.config")

DEFAULT_SEARCH_HEIGHT = 200
FORMATS = ("text", "json")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigError(Exception):
    """Raised for an invalid flag or environment value."""


@dataclass(frozen=True)
class RunConfig:
    dataset: Optional[Path] = None
    point_limit: int = DEFAULT_POINT_LIMIT
    trial_limit: int = DEFAULT_TRIAL_LIMIT
    search_height: int = DEFAULT_SEARCH_HEIGHT
    format: str = "text"
    strict: bool = False
    log_level: str = "WARNING"

    def __post_init__(self):
        for name in ("point_limit", "trial_limit", "search_height"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"log level must be one of {LOG_LEVELS}, got {self.log_level!r}")

    def require_dataset(self) -> Path:
        if self.dataset is None:
            raise ConfigError("a newform dataset is required: pass --dataset or set QCURVE_DATASET")
        if not self.dataset.exists():
            raise ConfigError(f"dataset not found: {self.dataset}")
        return self.dataset

    def to_dict(self) -> dict:
        return {
            "dataset": str(self.dataset) if self.dataset else None,
            "point_limit": self.point_limit,
            "trial_limit": self.trial_limit,
            "search_height": self.search_height,
            "format": self.format,
            "strict": self.strict,
        }


def _int_env(env: Mapping[str, str], key: str) -> Optional[int]:
    raw = env.get(key)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def _bool_env(env: Mapping[str, str], key: str) -> Optional[bool]:
    raw = env.get(key)
    if raw is None or raw == "":
        return None
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be 0/1 or true/false, got {raw!r}")


def from_env(env: Optional[Mapping[str, str]] = None) -> RunConfig:
    env = os.environ if env is None else env
    values = {
        "dataset": Path(env["QCURVE_DATASET"]) if env.get("QCURVE_DATASET") else None,
        "point_limit": _int_env(env, "QCURVE_POINT_LIMIT"),
        "trial_limit": _int_env(env, "QCURVE_TRIAL_LIMIT"),
        "search_height": _int_env(env, "QCURVE_SEARCH_HEIGHT"),
        "format": env.get("QCURVE_FORMAT") or None,
        "strict": _bool_env(env, "QCURVE_STRICT"),
        "log_level": (env.get("QCURVE_LOG_LEVEL") or "").upper() or None,
    }
    return RunConfig(**{k: v for k, v in values.items() if v is not None})


def load_config(overrides: Optional[Mapping] = None, env: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Environment first, then every override that is not None."""
    config = from_env(env)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "dataset" in overrides:
        overrides["dataset"] = Path(overrides["dataset"])
    if "log_level" in overrides:
        overrides["log_level"] = str(overrides["log_level"]).upper()
    if overrides:
        config = replace(config, **overrides)
    logger.debug("config: %s", config.to_dict())
    return config
