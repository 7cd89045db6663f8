"""File formats: matrix CSV and JSON with 17-significant-digit floats.

Matrix CSV is plain comma-separated numeric rows with no header, one matrix
per file. Floats are written with ``%.17g`` everywhere so values survive a
round trip bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import specmat

FLOAT_FMT = ".17g"


def read_matrix(path) -> np.ndarray:
    """Load a matrix CSV; raises ``OSError`` for unreadable files, ``ValueError`` for bad content."""
    text = Path(path).read_text()
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError(f"{path}: no rows")
    try:
        data = [[float(x) for x in row.split(",")] for row in rows]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if len({len(r) for r in data}) != 1:
        raise ValueError(f"{path}: rows have different lengths")
    return specmat.as_matrix(data)


def format_matrix(M) -> str:
    a = np.atleast_2d(np.asarray(M, dtype=float))
    return "".join(",".join(format(float(x), FLOAT_FMT) for x in row) + "\n" for row in a)


def write_matrix(path, M) -> None:
    Path(path).write_text(format_matrix(M))


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return "null"
        text = format(v, FLOAT_FMT)
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float, np.number)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in obj) + "]"
        items = [_encode(x, indent, level + 1) for x in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float at 17 significant digits; non-finite floats become null."""
    return _encode(obj, indent, 0) + "\n"
