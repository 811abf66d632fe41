"""
Artifact writers. Output depends only on its inputs (no timestamps, fixed key and row
order, 17 significant digits), so identical runs give byte-identical files.

Every file carries a provenance block with the config sha256 and the seed: JSON
documents under a top-level ``"provenance"`` key, CSV files as ``#`` comment lines
ahead of the header row.
"""
from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np


def fmt_number(x) -> str:
    """17 significant digits for floats, plain digits for integers; non-finite as nan/inf."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"   # also folds -0.0, which would otherwise make sign noise visible
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats; NaN and infinities become null."""
    return _dump(obj, 0, indent) + "\n"


def _dump(obj, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "null" if not math.isfinite(obj) else fmt_number(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _dump([obj.real, obj.imag], level, indent)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _dump(obj.tolist(), level, indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(v, level + 1, indent)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_dump(v, level + 1, indent) for v in obj]
        # short flat rows of scalars stay on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_text(header, rows, provenance: dict | None = None) -> str:
    lines = []
    if provenance:
        for line in dumps(provenance, indent=0).splitlines():
            lines.append("# " + line if line else "#")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt_number(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def write_csv(path, header, rows, provenance=None) -> Path:
    return write_text(Path(path), csv_text(header, rows, provenance))


def write_json(path, doc) -> Path:
    return write_text(Path(path), dumps(doc))


def table_rows(table: np.ndarray):
    """(i, j, value) rows of a 2-D table, row-major."""
    n, m = table.shape
    for i in range(n):
        for j in range(m):
            yield (i, j, table[i, j])
