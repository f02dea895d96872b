"""
Trajectory Plots

Line charts of trajectory CSV columns against t, rendered to SVG with the
Agg backend. The SVG carries no date and uses a fixed id salt, so equal
input bytes give equal output bytes.
"""

import io
import logging
import re
from pathlib import Path
from typing import Dict, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.batch.export import atomic_write_text, read_columns  # noqa: E402
from src.exceptions import ConfigError  # noqa: E402

logger = logging.getLogger(__name__)

SVG_SALT = "nmw-plot"
ABS_COLUMN = re.compile(r"^lambda_abs_(\d+)$")


def resolve_column(columns: Dict[str, np.ndarray], name: str) -> np.ndarray:
    """Stored column, or |lambda_k| for the virtual name lambda_abs_<k>"""
    if name in columns:
        return columns[name]
    match = ABS_COLUMN.match(name)
    if match:
        k = match.group(1)
        re_name, im_name = f"lambda_re_{k}", f"lambda_im_{k}"
        if re_name in columns and im_name in columns:
            return np.hypot(columns[re_name], columns[im_name])
    raise ConfigError(f"column '{name}' not found; available: {', '.join(columns)}")


def render_svg(columns: Dict[str, np.ndarray], names: Sequence[str], title: str = "") -> str:
    if "t" not in columns:
        raise ConfigError("trajectory CSV has no 't' column")
    if not names:
        raise ConfigError("no columns selected for plotting")
    series = [(name, resolve_column(columns, name)) for name in names]

    with plt.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        try:
            for name, values in series:
                ax.plot(columns["t"], values, label=name, linewidth=1.4)
            ax.set_xlabel("t")
            ax.grid(True, alpha=0.3)
            ax.legend(loc="best")
            if title:
                ax.set_title(title)
            buffer = io.StringIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return buffer.getvalue()


def plot_csv(csv_path: Union[str, Path], names: Sequence[str], out_path: Union[str, Path]) -> Path:
    """
    Plot selected columns of a trajectory CSV against t.

    Raises:
        ConfigError: missing file, empty table or unknown column
    """
    columns = read_columns(csv_path)
    svg = render_svg(columns, names)
    path = atomic_write_text(out_path, svg)
    logger.info("Plotted %s from %s", ", ".join(names), csv_path)
    return path
