"""Experiment runners, canned table configurations and report writers."""

from .configs import ExperimentConfig, load_config, REPRODUCE_TABLES
from .experiments import (
    GainReport,
    run_break_frequency,
    run_price_comparison,
    run_rms,
)

__all__ = [
    "ExperimentConfig",
    "GainReport",
    "REPRODUCE_TABLES",
    "load_config",
    "run_break_frequency",
    "run_price_comparison",
    "run_rms",
]
