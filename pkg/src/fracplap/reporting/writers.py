"""
CSV, JSON and Markdown artifact writers.

Every artifact records the SHA-256 of the resolved configuration: CSV and
Markdown files start with a `# config-sha256: <hash>` comment line, JSON
documents carry it as their first key. Floats are written with seventeen
significant digits so repeated runs are byte-identical.
"""

import json
import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from fracplap.core.constants import CSV_FLOAT_FORMAT
from fracplap.core.logging_config import get_logger

logger = get_logger(__name__)

HASH_PREFIX = "# config-sha256: "


def format_float(value: float) -> str:
    return CSV_FLOAT_FORMAT % value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int | float | np.floating | np.integer):
        return format_float(float(value))
    return str(value)


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]], config_sha256: str) -> str:
    """Hash comment, header row, then one comma-separated line per row."""
    lines = [HASH_PREFIX + config_sha256, ",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Row has {len(row)} cells, header has {len(header)}")
        lines.append(",".join(_cell(value) for value in row))
    return "\n".join(lines) + "\n"


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, list | tuple | np.ndarray):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        number = float(value)
        if math.isfinite(number):
            return number
        return str(number)
    return value


def json_text(payload: Mapping[str, Any], config_sha256: str) -> str:
    """config_sha256 first, remaining keys sorted, non-finite floats as strings."""
    body = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    head = json.dumps({"config_sha256": config_sha256}, indent=2)
    if body == "{}":
        return head + "\n"
    return head[:-2] + ",\n" + body[2:] + "\n"


def write_csv(
    path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]], config_sha256: str
) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows, config_sha256), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_json(path: Path, payload: Mapping[str, Any], config_sha256: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json_text(payload, config_sha256), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_markdown(path: Path, text: str, config_sha256: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(HASH_PREFIX + config_sha256 + "\n\n" + text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def read_csv_column(path: Path, column: str) -> np.ndarray:
    """
    Read one column of a CSV written by write_csv (comment lines skipped).

    Raises:
        ValueError: If the column is absent
    """
    lines = [
        line
        for line in path.read_text(encoding="utf-8").splitlines()
        if line and not line.startswith("#")
    ]
    if not lines:
        raise ValueError(f"{path} has no header row")
    header = lines[0].split(",")
    if column not in header:
        raise ValueError(f"{path} has no column '{column}' (columns: {', '.join(header)})")
    index = header.index(column)
    return np.array([float(line.split(",")[index]) for line in lines[1:]], dtype=float)
