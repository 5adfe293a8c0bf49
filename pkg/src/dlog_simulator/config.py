# src/dlog_simulator/config.py
from functools import lru_cache
from pathlib import Path

import yaml
from pydantic_settings import BaseSettings, SettingsConfigDict

from dlog_simulator.quadrature.integrate import QuadratureConfig

DEFAULT_CONFIG_PATH = "config/main.yaml"


class Settings(BaseSettings):
    # Numerics
    PRECISION_BITS: int = 192
    BASE_PANELS: int = 64
    REFINE_LIMIT: int = 20
    REL_TOL: float = 1e-10
    ABS_TOL: float = 1e-40

    # Histogram
    CELLS_PER_UNIT: int = 4

    # Oracle resource guard (m + ell)
    ORACLE_MAX_BITS: int = 12

    # Solver
    TAU_BOUND: int = 2**20

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False

    model_config = SettingsConfigDict(
        env_prefix="DLOGSIM_", env_file=".env", extra="ignore"
    )

    def quadrature_config(self, precision_bits: int | None = None) -> QuadratureConfig:
        return QuadratureConfig(
            precision_bits=precision_bits or self.PRECISION_BITS,
            base_panels=self.BASE_PANELS,
            refine_limit=self.REFINE_LIMIT,
            rel_tol=self.REL_TOL,
            abs_tol=self.ABS_TOL,
        )


@lru_cache
def get_settings() -> Settings:
    return Settings()


def load_config(config_path: str | Path = DEFAULT_CONFIG_PATH) -> dict:
    """Load campaign defaults from YAML; a missing file yields an empty dict."""
    path = Path(config_path)
    if not path.exists():
        return {}
    with open(path, "r") as f:
        return yaml.safe_load(f) or {}
