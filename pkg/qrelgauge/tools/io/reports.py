"""
Report emission: JSON (lossless, orjson) and CSV (one table per file).
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import orjson

from ...schemas import Report
from ...shared_libraries.config import config

logger = logging.getLogger(__name__)

ReportFormat = Literal["csv", "json"]

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_APPEND_NEWLINE


def _round(value: Any, digits: Optional[int]) -> Any:
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    if not math.isfinite(value):
        # JSON has no inf/nan; null is lossy, so say so
        logger.warning(f"Non-finite value {value!r} written as null in JSON report")
        return None
    if digits is None:
        return value
    return float(f"{value:.{digits}g}")


def _prepare(obj: Any, digits: Optional[int]) -> Any:
    if isinstance(obj, dict):
        return {str(key): _prepare(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(item, digits) for item in obj]
    return _round(obj, digits)


def _csv_cell(value: Any, digits: Optional[int]) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if digits is None:
            return repr(value)
        return f"{value:.{digits}g}"
    return str(value)


def _digits(full_precision: Optional[bool]) -> Optional[int]:
    if full_precision is None:
        full_precision = config.report.full_precision
    return None if full_precision else config.report.significant_digits


def emit_report(
    report: Report,
    format: ReportFormat = "json",
    table: Optional[str] = None,
    full_precision: Optional[bool] = None,
) -> str:
    """
    Render a report.

    JSON carries the whole report. CSV carries a single table: ``table`` names it,
    and may be omitted when the report has at most one table.
    """
    digits = _digits(full_precision)

    if format == "json":
        return orjson.dumps(_prepare(report.model_dump(), digits), option=_JSON_OPTIONS).decode("utf-8")

    if format != "csv":
        raise ValueError(f"unknown report format: {format}")
    if table is None:
        if not report.tables:
            return ""
        if len(report.tables) > 1:
            raise ValueError(f"report has {len(report.tables)} tables; name one of {sorted(report.tables)}")
        table = next(iter(report.tables))

    data = report.tables[table]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(data.columns)
    for row in data.rows:
        writer.writerow([_csv_cell(value, digits) for value in row])
    return buffer.getvalue()


def parse_report(text: str) -> Report:
    """Read a JSON report back into the report model."""
    return Report.model_validate(orjson.loads(text))


def render_report(
    report: Report,
    name: str,
    format: Literal["csv", "json", "both"] = "both",
    full_precision: Optional[bool] = None,
) -> Dict[str, str]:
    """File name -> text for ``<name>.json`` and/or one ``<name>.<table>.csv`` per table."""
    if format not in ("csv", "json", "both"):
        raise ValueError(f"unknown report format: {format}")
    rendered: Dict[str, str] = {}
    if format in ("json", "both"):
        rendered[f"{name}.json"] = emit_report(report, "json", full_precision=full_precision)
    if format in ("csv", "both"):
        for table in report.tables:
            rendered[f"{name}.{table}.csv"] = emit_report(report, "csv", table=table, full_precision=full_precision)
    return rendered


def write_report(
    report: Report,
    output_dir: Path,
    name: str,
    format: Literal["csv", "json", "both"] = "both",
    full_precision: Optional[bool] = None,
) -> List[Path]:
    """Write ``<name>.json`` and/or one ``<name>.<table>.csv`` per table."""
    output_dir = Path(output_dir)
    rendered = {output_dir / file_name: text for file_name, text in render_report(report, name, format, full_precision).items()}

    output_dir.mkdir(parents=True, exist_ok=True)
    for path, text in rendered.items():
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {path}")
    return list(rendered)
