from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings, read from ``ANNEALED_MPC_*`` env vars or ``.env``.

    Experiment parameters do not live here; they come from the experiment
    config file (see ``app.services.bench.config``).
    """

    model_config = SettingsConfigDict(
        env_prefix="ANNEALED_MPC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Parallelism cap (seeds and rollout chunks); never changes results
    threads: int = Field(default=1, ge=1)

    # Logging
    log_level: str = "INFO"

    # Artifacts
    output_dir: str = "results"
    csv_schema_version: int = 1

    # Landscape grid cells per axis
    landscape_resolution: int = Field(default=2048, ge=16)


@lru_cache
def get_settings() -> Settings:
    return Settings()
