"""
CSV and JSON rendering of command results.

Numbers are written with AppConfig.OUTPUT_DIGITS significant digits. CSV
output starts with a `# {json}` line echoing every parameter of the run;
JSON output carries the same dictionary under "metadata".
"""

from __future__ import annotations

import io
import csv
import json
import math
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from ..config import AppConfig

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


def _round(value: Any, digits: int) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, complex):
        return {"real": _round(value.real, digits), "imag": _round(value.imag, digits)}
    if isinstance(value, float) or hasattr(value, "dtype"):
        value = float(value)
        if not math.isfinite(value):
            return None if math.isnan(value) else str(value)
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, digits) for v in value]
    return value


def format_number(value: Any, digits: int = AppConfig.OUTPUT_DIGITS) -> str:
    """Text form of one CSV cell."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        value = float(value)
        return "nan" if math.isnan(value) else f"{value:.{digits}g}"
    return str(value)


class ResultExporter:
    """Renders tables of results and writes them to stdout or a file."""

    def __init__(self, fmt: str = AppConfig.DEFAULT_FORMAT, digits: int = AppConfig.OUTPUT_DIGITS):
        if fmt not in FORMATS:
            raise ValueError(f"format {fmt!r} must be one of {FORMATS}")
        self.fmt = fmt
        self.digits = digits

    def render(self, columns: Sequence[str], rows: Iterable[Sequence[Any]], metadata: Dict[str, Any]) -> str:
        rows = list(rows)
        if self.fmt == "json":
            records = [dict(zip(columns, row)) for row in rows]
            payload = {"metadata": _round(metadata, self.digits), "rows": _round(records, self.digits)}
            return json.dumps(payload, indent=2, sort_keys=True) + "\n"

        buffer = io.StringIO()
        buffer.write("# " + json.dumps(_round(metadata, self.digits), sort_keys=True) + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(cell, self.digits) for cell in row])
        return buffer.getvalue()

    def render_record(self, record: Dict[str, Any], metadata: Dict[str, Any]) -> str:
        """A single result as a one-row table."""
        return self.render(list(record), [list(record.values())], metadata)

    def write(self, text: str, output: Optional[Union[str, Path]] = None) -> Optional[Path]:
        if output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {self.fmt} output to {path}")
        return path


def load_csv_rows(path: Union[str, Path]) -> List[Dict[str, str]]:
    """Read back a CSV written by ResultExporter, skipping the metadata line."""
    with open(path, encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def read_metadata(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as handle:
        first = handle.readline()
    if not first.startswith("# "):
        return {}
    return json.loads(first[2:])
