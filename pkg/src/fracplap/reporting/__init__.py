"""Markdown summaries and reproducible CSV/JSON artifacts."""

from fracplap.reporting.loader import ReportLoader, render_report, report_loader
from fracplap.reporting.writers import (
    HASH_PREFIX,
    csv_text,
    format_float,
    json_text,
    read_csv_column,
    write_csv,
    write_json,
    write_markdown,
)

__all__ = [
    "HASH_PREFIX",
    "ReportLoader",
    "csv_text",
    "format_float",
    "json_text",
    "read_csv_column",
    "render_report",
    "report_loader",
    "write_csv",
    "write_json",
    "write_markdown",
]
