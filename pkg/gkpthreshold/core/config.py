"""
Configuration management
Application constants plus per-run options loaded from flags and an optional JSON file
"""

import logging
import sys
from typing import List, Literal, Optional, Tuple, Type

from pydantic import field_validator
from pydantic_settings import (
    BaseSettings,
    JsonConfigSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)


class Settings(BaseSettings):
    """
    Application settings
    """

    model_config = SettingsConfigDict(case_sensitive=True, frozen=True)

    # Application
    APP_NAME: str = "GKP Cluster-State Threshold Analysis"
    APP_VERSION: str = "1.0.0"

    # Logging
    LOG_LEVEL: str = "INFO"

    # Monte Carlo
    DEFAULT_SEED: int = 12345
    MC_CHUNK_SIZE: int = 65536  # samples per independent RNG stream
    DEFAULT_SAMPLES: int = 1_000_000

    # Numerics
    FLOAT_TOL: float = 1e-12
    ROOT_REL_TOL: float = 1e-9
    TAIL_EXPONENT: float = 30.0  # lattice tail below e^-30 of the envelope peak

    # Analysis constants
    VACUUM_VARIANCE: float = 0.5
    DISTILLATION_THRESHOLD: float = 0.146
    TABLE_I_PFT: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)

    # Curve defaults (dB)
    CURVE_DB_MIN: float = 10.0
    CURVE_DB_MAX: float = 22.0
    CURVE_POINTS: int = 121

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # no environment or .env lookup; everything comes from flags or --config
        return (init_settings,)


settings = Settings()


class RunOptions(BaseSettings):
    """Per-invocation options. Keys mirror the CLI flags (dashes become underscores)."""

    model_config = SettingsConfigDict(extra="forbid", case_sensitive=True)

    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None
    log_level: str = settings.LOG_LEVEL
    stamp: bool = False

    # thresholds / curve
    pft: List[float] = list(settings.TABLE_I_PFT)
    db_min: float = settings.CURVE_DB_MIN
    db_max: float = settings.CURVE_DB_MAX
    points: int = settings.CURVE_POINTS

    # shared
    gate: str = "cz"
    sigma2: Optional[float] = None
    db: Optional[float] = None

    # noise-table
    symbolic: bool = False

    # mc
    samples: int = settings.DEFAULT_SAMPLES
    seed: int = settings.DEFAULT_SEED
    count_convention: Literal["half_cell", "exact_modular"] = "half_cell"

    # distill
    blur_variance: Optional[float] = None
    envelope_variance: Optional[float] = None
    truncation: Optional[int] = None
    product_override: Optional[float] = None

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, v: str) -> str:
        if not validate_log_level(v):
            raise ValueError(f"unknown log level {v!r}, expected one of {', '.join(LOG_LEVELS)}")
        return v.upper()

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # flags first, then the JSON file named by --config
        return (init_settings, JsonConfigSettingsSource(settings_cls))


def load_run_options(config_path: Optional[str] = None, **overrides) -> RunOptions:
    """Build RunOptions from an optional JSON file; explicit ``overrides`` win."""
    if config_path is None:
        return RunOptions(**overrides)

    class _FileRunOptions(RunOptions):
        model_config = SettingsConfigDict(json_file=config_path, json_file_encoding="utf-8")

    return _FileRunOptions(**overrides)


# Validation functions

GATE_NAMES = ("i", "p", "f", "cz")


def validate_gate(name: str) -> bool:
    """Validate gate name (case-insensitive)"""
    return name.lower() in GATE_NAMES


def validate_probability(p: float) -> bool:
    """Validate an open-interval probability"""
    return 0.0 < p < 1.0


def validate_variance(v: float) -> bool:
    """Validate a strictly positive variance"""
    return v > 0.0


LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def validate_log_level(level: str) -> bool:
    """Validate a logging level name (case-insensitive)"""
    return str(level).upper() in LOG_LEVELS


# Logging

def configure_logging(level: Optional[str] = None) -> None:
    """Send package logs to stderr at ``level`` (defaults to settings.LOG_LEVEL)."""
    root = logging.getLogger("gkpthreshold")
    root.setLevel((level or settings.LOG_LEVEL).upper())
    if not any(getattr(h, "_gkpthreshold", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._gkpthreshold = True
        root.addHandler(handler)
    else:
        for h in root.handlers:
            if getattr(h, "_gkpthreshold", False):
                # rebind without flushing: the previous stderr may already be closed
                h.stream = sys.stderr
    root.propagate = False
