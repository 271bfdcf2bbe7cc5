"""
Configuration management for the transshipment optimizer.
Centralized defaults with validation; only the output directory and logging
are read from the environment.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Project root directory
ROOT = Path(__file__).parent.absolute()
ENV_PATH = ROOT / ".env"

# Load environment variables
load_dotenv(ENV_PATH)


class Config:
    """Application configuration with validation."""

    # Project paths
    PROJECT_ROOT: Path = ROOT
    OUTPUT_DIR: str = os.getenv("TRANSSHIP_OUTPUT_DIR", str(ROOT / "results"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR: str = os.getenv("LOG_DIR", "")
    LOG_JSON: bool = os.getenv("LOG_JSON", "false").lower() == "true"

    # Numerics
    TOLERANCE: float = 1e-9
    BRUTE_FORCE_MAX_LOCATIONS: int = 4
    MAX_SIMPLEX_PIVOTS: int = 10_000

    # Scenario sampling
    DEFAULT_SCENARIOS: int = 500
    DEFAULT_SCENARIO_SEED: int = 42

    # SPEA2 defaults (archive/population/generations/rates as in the reference experiment)
    DEFAULT_ARCHIVE_SIZE: int = 100
    DEFAULT_POPULATION_SIZE: int = 200
    DEFAULT_GENERATIONS: int = 15
    DEFAULT_CROSSOVER_RATE: float = 0.85
    DEFAULT_MUTATION_RATE: float = 0.05
    DEFAULT_S_MAX: float = 400.0
    DEFAULT_ETA_CROSSOVER: float = 15.0
    DEFAULT_ETA_MUTATION: float = 20.0
    DEFAULT_SEED: int = 1

    # Landscape sampling
    DEFAULT_LANDSCAPE_SAMPLES: int = 30_000
    DEFAULT_OBJECTIVE_SPACE_SAMPLES: int = 12_000

    # Export
    FLOAT_FORMAT: str = "%.9g"

    @classmethod
    def validate(cls) -> list[str]:
        """
        Validate configuration and return list of warnings.

        Returns:
            List of warning messages
        """
        warnings = []

        if cls.TOLERANCE <= 0:
            warnings.append(f"TOLERANCE should be positive, got {cls.TOLERANCE}")

        if cls.DEFAULT_S_MAX <= 0:
            warnings.append(f"DEFAULT_S_MAX should be positive, got {cls.DEFAULT_S_MAX}")

        if not 0.0 <= cls.DEFAULT_CROSSOVER_RATE <= 1.0:
            warnings.append(f"DEFAULT_CROSSOVER_RATE should be within [0, 1], got {cls.DEFAULT_CROSSOVER_RATE}")

        if not 0.0 <= cls.DEFAULT_MUTATION_RATE <= 1.0:
            warnings.append(f"DEFAULT_MUTATION_RATE should be within [0, 1], got {cls.DEFAULT_MUTATION_RATE}")

        if cls.LOG_LEVEL.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            warnings.append(f"LOG_LEVEL '{cls.LOG_LEVEL}' is not a standard level; INFO will be used")

        return warnings

    @classmethod
    def get_summary(cls) -> dict:
        """Get configuration summary."""
        return {
            "output_dir": cls.OUTPUT_DIR,
            "log_level": cls.LOG_LEVEL,
            "tolerance": cls.TOLERANCE,
            "scenarios": {
                "default_n": cls.DEFAULT_SCENARIOS,
                "default_seed": cls.DEFAULT_SCENARIO_SEED,
            },
            "spea2": {
                "archive": cls.DEFAULT_ARCHIVE_SIZE,
                "population": cls.DEFAULT_POPULATION_SIZE,
                "generations": cls.DEFAULT_GENERATIONS,
                "crossover_rate": cls.DEFAULT_CROSSOVER_RATE,
                "mutation_rate": cls.DEFAULT_MUTATION_RATE,
                "s_max": cls.DEFAULT_S_MAX,
            },
        }


# Validate configuration and log warnings
config_warnings = Config.validate()
if config_warnings:
    import logging
    logger = logging.getLogger(__name__)
    for warning in config_warnings:
        logger.warning(f"Configuration warning: {warning}")
