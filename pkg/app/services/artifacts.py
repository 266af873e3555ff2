"""
CSV and SVG emission shared by the landscape tool and the bench harness.

CSV files start with a schema comment line. SVGs are written with a fixed
hash salt and no date so repeated runs produce identical files.
"""

import csv
import logging
from pathlib import Path
from collections.abc import Iterable, Sequence

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from app.core.config import get_settings

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "annealed-mpc"


def schema_line() -> str:
    return f"# annealed-mpc csv schema v{get_settings().csv_schema_version}"


def format_value(value) -> str:
    """Booleans as true/false, floats as their shortest round-trip repr, None as empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(schema_line() + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def read_csv(path: Path | str) -> list[dict[str, str]]:
    """Rows of a CSV written by ``write_csv`` (schema line skipped)."""
    with Path(path).open(encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def save_svg(fig, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path
