"""Experiment harness: exact solutions, configuration, studies and output files."""

from .config import PRESETS, ConfigError, RunConfig, load_config, parse_config
from .exact import (
    exact_kdv_one_soliton,
    exact_kdv_two_soliton,
    exact_nls_plane_wave,
    nls_plane_wave_state,
    nls_singular_state,
    sg_initial,
    wrap_interval,
)
from .study import ErrorRow, ExperimentReport, compare_schemes, convergence_study, run_single, spatial_study

__all__ = [
    "ConfigError",
    "ErrorRow",
    "ExperimentReport",
    "PRESETS",
    "RunConfig",
    "compare_schemes",
    "convergence_study",
    "exact_kdv_one_soliton",
    "exact_kdv_two_soliton",
    "exact_nls_plane_wave",
    "load_config",
    "nls_plane_wave_state",
    "nls_singular_state",
    "parse_config",
    "run_single",
    "sg_initial",
    "spatial_study",
    "wrap_interval",
]
