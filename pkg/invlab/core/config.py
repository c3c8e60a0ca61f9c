# invlab/core/config.py

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from invlab.core.errors import ConfigError

load_dotenv()

DEFAULT_SEED = 0x5EED


class Settings(BaseModel):
    """
    Process-wide knobs read from the environment (or a local .env file).
    """

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1)
    seed: int = DEFAULT_SEED
    output_dir: Path = Path("artifacts")
    log_level: str = "INFO"
    group_order_cap: int = 1024
    quad_max_doublings: int = 8
    gate_horizon: float = 1000.0

    @field_validator("threads", "group_order_cap", "quad_max_doublings")
    @classmethod
    def _positive_int(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @field_validator("gate_horizon")
    @classmethod
    def _positive_float(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value!r}")
        return value


_ENV_KEYS = {
    "threads": "INVLAB_THREADS",
    "seed": "INVLAB_SEED",
    "output_dir": "INVLAB_OUTPUT_DIR",
    "log_level": "INVLAB_LOG_LEVEL",
    "group_order_cap": "INVLAB_GROUP_ORDER_CAP",
    "quad_max_doublings": "INVLAB_QUAD_MAX_DOUBLINGS",
    "gate_horizon": "INVLAB_GATE_HORIZON",
}


def load_settings(**overrides) -> Settings:
    """
    Build settings from INVLAB_* variables; explicit keyword overrides win.
    """
    values = {}
    for field, env_name in _ENV_KEYS.items():
        raw = os.getenv(env_name)
        if raw not in (None, ""):
            values[field] = int(raw, 0) if field == "seed" and raw.lower().startswith("0x") else raw
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid invlab settings: {e.errors()[0]['loc']} {e.errors()[0]['msg']}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
