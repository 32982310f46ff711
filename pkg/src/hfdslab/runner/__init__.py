"""Experiment orchestration: configs, sweeps, record log, CLI."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .records import RecordWriter, export, payload_line, read_records
from .recipes import RECIPES, recipe
from .run import expand_points, run, run_point

__all__ = ["ConfigError", "ExperimentConfig", "RECIPES", "RecordWriter",
           "expand_points", "export", "load_config", "parse_config",
           "payload_line", "read_records", "recipe", "run", "run_point"]
