"""
Configuration settings for ultragraph-kms.

Handles the verification depths, tolerances and search brackets every
command falls back on. Same idea as always: pydantic-settings reads them from
environment variables (prefix ULTRAKMS_) or a .env file, and the CLI flags
override them for a single run.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    App settings - loads from env vars and .env file.

    Every knob here is a default; functions take explicit arguments and only
    read these when the caller passes nothing.
    """

    # Shift-space oracle
    depth: int = Field(6, ge=0)  # L: how deep below a stem we enumerate points
    edge_window: int = Field(4, ge=1)  # edges sampled from each infinite emitter

    # State verification
    fbound: int = Field(8, ge=0)  # largest excluded set F tried for m3
    tol: float = Field(1e-9, gt=0)  # float-mode tolerance
    lattice_length: int = Field(30, ge=1)  # vertices/edges in the default test lattice

    # Presented families
    family_depth: int = Field(64, ge=1)  # first edges per emitter we are willing to look at

    # Critical beta search
    beta_lo: float = 0.0
    beta_hi: float = 64.0
    power_max_iter: int = Field(10000, ge=1)

    # Logging
    log_level: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="ULTRAKMS_",
        env_file=".env",
        case_sensitive=False,  # Makes env var names more flexible
        extra="ignore",
    )


# Global instance - import this everywhere
settings = Settings()
