"""
Configuration settings for latspec
Uses pydantic-settings for environment variable management
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Numerical tolerances and runtime limits loaded from environment variables"""

    # Runtime settings
    LATSPEC_THREADS: int = 1
    LOG_LEVEL: str = "WARNING"

    # Grid limits
    MAX_GRID_NODES: int = 2_000_000
    ORACLE_MAX_NODES: int = 128
    ORACLE_MAX_DIMENSION: int = 10_000

    # Default grid sizes for the CLI
    DEFAULT_N_QUAD: int = 64
    DEFAULT_N_K: int = 64
    DEFAULT_N_ORACLE: int = 48
    DEFAULT_PATH_POINTS: int = 33

    # Fiber (Friedrichs model) settings
    GAP_GUARD: float = 1e-8
    EDGE_PROBE: float = 1e-6
    ROOT_XTOL: float = 1e-12
    RESIDUAL_TOL: float = 1e-8
    DEGENERATE_TOL: float = 1e-9
    BRACKET_LIMIT: float = 1e6

    # Extrema polish
    POLISH_TOL: float = 1e-10

    # Channel settings
    MERGE_TOL: float = 1e-12
    ENDPOINT_REFINE_ROUNDS: int = 3
    ENDPOINT_REFINE_ZOOM: int = 10

    # Faddeev settings
    NEAR_SINGULAR_TOL: float = 1e-12
    FADDEEV_MAX_NODES: int = 2048
    Z_MESH_POINTS: int = 2001
    EVEN_ROOT_TOL: float = 1e-10
    EIGEN_CHECK_TOL: float = 1e-6
    ROOT_DEDUP_TOL: float = 1e-9
    ROOT_ACCEPT_TOL: float = 1e-4
    EVEN_ROOT_PROBE_RATIO: float = 1e-3

    # Oracle comparison
    ESS_TOL: float = 0.05
    DISC_TOL: float = 1e-3

    # Model validation
    VALIDATION_SAMPLES: int = 100
    VALIDATION_SEED: int = 20240917
    SYMMETRY_TOL: float = 1e-12

    class Config:
        env_file = ".env"
        case_sensitive = True


# Global settings instance
settings = Settings()
