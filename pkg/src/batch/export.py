"""
File Export

Trajectory CSV, report JSON and sweep summaries. Every file is written to a
temporary sibling first and moved into place, so readers never see partial
output.
"""

import csv
import io
import logging
import os
import tempfile
import warnings
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from src.dynamics.trajectory import Trajectory
from src.exceptions import ConfigError
from src.witness.report import WitnessReport

logger = logging.getLogger(__name__)

CSV_FORMAT = "%.16e"


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write text to path via a temporary file in the same directory"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("Wrote %s", path)
    return path


def trajectory_columns(traj: Trajectory) -> List[str]:
    n_eig = traj.eigenvalues.shape[1]
    n_axes = traj.semi_axes.shape[1]
    return (
        ["t", "f", "vol", "q_norm"]
        + [f"lambda_re_{i}" for i in range(n_eig)]
        + [f"lambda_im_{i}" for i in range(n_eig)]
        + [f"s_{i}" for i in range(n_axes)]
    )


def trajectory_table(traj: Trajectory) -> np.ndarray:
    return np.column_stack([
        traj.times,
        traj.f,
        traj.vol,
        traj.q_norm,
        traj.eigenvalues.real,
        traj.eigenvalues.imag,
        traj.semi_axes,
    ])


def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> Path:
    """One row per grid point, 17 significant digits"""
    buffer = io.StringIO()
    np.savetxt(buffer, trajectory_table(traj), fmt=CSV_FORMAT, delimiter=",",
               header=",".join(trajectory_columns(traj)), comments="")
    return atomic_write_text(path, buffer.getvalue())


def write_report_json(report: WitnessReport, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, report.to_json() + "\n")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_summary_csv(header: Sequence[str], rows: Sequence[Sequence], path: Union[str, Path]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([_csv_cell(v) for v in row] for row in rows)
    return atomic_write_text(path, buffer.getvalue())


def read_columns(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """
    Read a trajectory CSV back into named columns.

    Raises:
        ConfigError: if the file is missing, malformed or has no data rows
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline().strip()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read trajectory CSV '{path}': {e}") from e

    names = [name for name in header.split(",") if name]
    if not names:
        raise ConfigError(f"trajectory CSV '{path}' has no header")
    if data.shape[0] == 0:
        raise ConfigError(f"trajectory CSV '{path}' has no data rows")
    if data.shape[1] != len(names):
        raise ConfigError(f"trajectory CSV '{path}' has {data.shape[1]} columns but {len(names)} names")
    return {name: data[:, i] for i, name in enumerate(names)}
