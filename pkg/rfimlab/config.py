"""
Configuration module for the laboratory.

This module defines the process-wide settings, loading them from environment
variables (and an optional ``.env`` file) using pydantic-settings, and the
validation helpers that guard experiment parameters before any compute starts.
"""

from typing import Any, Dict

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from rfimlab.exceptions import ParameterError

load_dotenv()


class Config(BaseSettings):
    """
    Main configuration class for the laboratory.

    Attributes:
        seed (int): Default master seed when a run does not name one.
        workers (int): Default size of the worker pool.
        output_dir (str): Default directory for run artifacts.
        debug_mode (bool): Enables DEBUG logging.
        record_timing (bool): Persist per-record wall time (breaks byte-identical reruns).
    """

    # `alias` maps environment variables to field names.
    model_config = SettingsConfigDict(extra="ignore", populate_by_name=True)

    seed: int = Field(default=20190615, alias="RFIM_LAB_SEED")
    workers: int = Field(default=1, alias="RFIM_LAB_WORKERS")
    output_dir: str = Field(default="runs", alias="RFIM_LAB_OUT")
    debug_mode: bool = Field(default=False, alias="DEBUG_MODE")
    record_timing: bool = Field(default=False, alias="RFIM_LAB_RECORD_TIMING")

    # Ground-state solver
    capacity_scale_bits: int = 20
    field_bound: float = float(2**30)
    bruteforce_max_sites: int = 20

    # Perturbation defaults
    gamma: float = 100.0
    alpha: float = 1.5
    alpha_prime: float = 0.9

    # Desk-scale geometry defaults
    aspect: int = 4
    factor: int = 8

    # Statistics
    bootstrap_resamples: int = 200
    confidence_z: float = 1.959963984540054
    flush_every: int = 64

    @property
    def capacity_scale(self) -> int:
        return 1 << self.capacity_scale_bits

    def get_solver_settings(self) -> Dict[str, Any]:
        """Get the settings for ground-state solver initialization."""
        return {
            "scale": self.capacity_scale,
            "field_bound": self.field_bound,
        }

    def update(self, **kwargs: Any) -> None:
        """Update configuration with provided values."""
        for key, value in kwargs.items():
            if hasattr(self, key):
                setattr(self, key, value)


# Global config instance
config = Config()


# Validation
def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_power_of_two(name: str, n: int, minimum: int = 1) -> None:
    """Validate that ``n`` is a power of two no smaller than ``minimum``."""
    if not is_power_of_two(n):
        raise ParameterError(f"{name} must be a power of two, got {n}")
    if n < minimum:
        raise ParameterError(f"{name} must be at least {minimum}, got {n}")


def validate_epsilon(epsilon: float) -> None:
    """Validate the disorder strength."""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")


def validate_samples(samples: int, minimum: int = 1) -> None:
    """Validate a Monte Carlo sample count."""
    if samples < minimum:
        raise ParameterError(f"samples must be at least {minimum}, got {samples}")
