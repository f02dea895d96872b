"""Batch front-end: scenario configuration, runs, sweeps and plots"""

from src.batch.catalog import CATALOG, catalog_json, catalog_text
from src.batch.config import ScenarioConfig, load_config, set_by_path, validate_config
from src.batch.export import read_columns, write_report_json, write_trajectory_csv
from src.batch.plotting import plot_csv
from src.batch.runner import RunResult, build_model, evaluate, run_file, run_scenario, sweep

__all__ = [
    'CATALOG',
    'catalog_json',
    'catalog_text',
    'ScenarioConfig',
    'load_config',
    'set_by_path',
    'validate_config',
    'read_columns',
    'write_report_json',
    'write_trajectory_csv',
    'plot_csv',
    'RunResult',
    'build_model',
    'evaluate',
    'run_file',
    'run_scenario',
    'sweep',
]
