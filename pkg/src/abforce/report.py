"""Report envelopes and the CSV dialect shared by all commands.

CSV: comma separated, header row, ``#`` comment lines for metadata. Floats
are written with ``repr`` so files are byte-identical across runs; missing
values are empty cells.
"""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone

from abforce import __version__


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        return repr(value)
    return str(value)


def to_csv(
    header: list[str],
    rows: list[list],
    comments: list[str] = (),
    stamp: bool = True,
) -> str:
    buf = io.StringIO()
    buf.write(f"# abforce {__version__}\n")
    if stamp:
        buf.write(f"# generated_utc {timestamp()}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def envelope(
    command: str,
    parameters: dict,
    results,
    warnings: list[str] = (),
    stamp: bool = True,
) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "results": _finite(results),
        "warnings": list(warnings),
        "version": __version__,
        "timestamp": timestamp() if stamp else None,
    }


def to_json(env: dict) -> str:
    return json.dumps(env, indent=2, allow_nan=False) + "\n"
