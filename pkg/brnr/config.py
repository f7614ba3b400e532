import os
from pathlib import Path

from pydantic import BaseModel, Field

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value else default


def default_cache_dir() -> Path:
    return Path(os.getenv("BRNR_CACHE_DIR", Path.home() / ".cache" / "brnr"))


class Settings(BaseModel):
    """Caps and locations shared by every operation."""

    cache_dir: Path = Field(default_factory=default_cache_dir)
    max_order: int = Field(default_factory=lambda: _env_int("BRNR_MAX_ORDER", 20000), ge=1)
    subgroup_cap: int = Field(default_factory=lambda: _env_int("BRNR_SUBGROUP_CAP", 512), ge=1)
    cochain_cap: int = Field(default_factory=lambda: _env_int("BRNR_COCHAIN_CAP", 250_000), ge=1)
    section_cap: int = Field(default_factory=lambda: _env_int("BRNR_SECTION_CAP", 200_000), ge=1)
    workers: int = Field(default_factory=lambda: _env_int("BRNR_WORKERS", 1), ge=1, le=64)

    # Exhaustive associativity checks up to this order, sampling above
    exhaustive_check_order: int = 512
    sample_triples: int = 20000


settings = Settings()


def configure(**overrides) -> Settings:
    """Updates the shared settings in place and returns them."""
    for key, value in overrides.items():
        if value is not None:
            setattr(settings, key, value)
    return settings
