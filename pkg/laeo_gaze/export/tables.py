"""Export result rows to CSV."""

import csv
import io
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence


def _cell(value: Any) -> Any:
    # str(float) is the shortest round-trip form
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def rows_to_csv(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    """
    Render rows as CSV text with a header line.

    Args:
        rows: One dict per row
        columns: Column order; defaults to the keys of the first row

    Returns:
        CSV string with ``\\n`` line endings
    """
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="raise")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    return buffer.getvalue()


def write_csv(path: str, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    Path(os.path.dirname(path) or ".").mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(rows_to_csv(rows, columns))
    return path
