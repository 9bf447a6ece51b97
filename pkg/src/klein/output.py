"""Deterministic CSV and JSON writers.

CSV floats use 17 significant digits so every value parses back to the
same double; JSON floats use Python's shortest round-trip repr.  Both are
locale independent and end lines with LF.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from typing import Any, Iterable, Sequence


def format_float(x: float) -> str:
    return format(x, ".17g")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def jsonable(obj: Any) -> Any:
    """Plain JSON types; NaN and infinities become None."""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return jsonable(obj.item())
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), allow_nan=False) + "\n"


def to_json_lines(items: Iterable[Any]) -> str:
    return "".join(json.dumps(jsonable(i), allow_nan=False) + "\n" for i in items)
