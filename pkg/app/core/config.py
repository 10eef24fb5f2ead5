from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="QANNEAL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Standard run (natural units, hbar = 1)
    T_F: float = 5000.0
    DT: float = 2.5
    BETA_F: float = 2500.0
    K0: float = 1.5e-3
    ETA_ZETA: float = 1.25e-5
    ETA_EPS: float = 5e-6

    # Tunneling ramp reaches zero at this fraction of the run
    RAMP_END_FRACTION: float = 0.5

    # |exponent| guard for exp(+-beta H)
    EXPONENT_LIMIT: float = 700.0

    # Eigendecompositions kept per process, keyed by step coefficients
    EIG_CACHE_SIZE: int = 8192

    OUTPUT_DIR: str = "runs"

    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"
    LOG_TO_FILE: bool = False

    # Epoch progress is logged every N epochs
    LOG_EVERY: int = 10

    # Noise Monte Carlo: 1 keeps evolution in-process
    NOISE_WORKERS: int = 1

    # Every Nth step goes into rho_series.csv / spins.csv
    SERIES_STRIDE: int = 10


settings = Settings()
