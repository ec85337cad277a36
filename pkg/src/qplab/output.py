"""CSV, JSON and SVG emission with 17 significant digits."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


def fmt(x) -> str:
    """Round-trip exact text for doubles; other values via str."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return format(x, ".17g")
    return str(x)


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats written at 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return fmt(obj)
    return json.dumps(str(obj))


def check(name: str, value, threshold, relation: str = "<") -> dict:
    """A summary entry carrying its value, its tolerance and the verdict."""
    ops = {
        "<": lambda v, t: v < t,
        ">": lambda v, t: v > t,
        "<=": lambda v, t: v <= t,
        ">=": lambda v, t: v >= t,
        "in": lambda v, t: t[0] <= v <= t[1],
    }
    passed = bool(ops[relation](value, threshold)) if np.all(np.isfinite(value)) else False
    return {"name": name, "value": value, "relation": relation, "threshold": threshold, "passed": passed}


@dataclass
class TaskResult:
    """Rows for the CSV, a summary for the JSON and an optional (x, y) curve."""

    columns: list
    rows: list
    summary: dict
    curve: tuple | None = None
    checks: list = field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(x) for x in r])
        return buf.getvalue()


def svg_polyline(x, y, xlabel: str = "x", ylabel: str = "y", width: int = 640, height: int = 400) -> str:
    """Self-contained SVG line plot."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    m = 50
    if x.size == 0:
        x, y = np.zeros(1), np.zeros(1)
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    px = m + (x - x0) / (x1 - x0) * (width - 2 * m)
    py = height - m - (y - y0) / (y1 - y0) * (height - 2 * m)
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" fill="none" stroke="#888"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="#1f4e9a" stroke-width="1.5"/>\n'
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" font-size="13">{xlabel}</text>\n'
        f'<text x="14" y="{height / 2:.0f}" font-size="13" transform="rotate(-90 14 {height / 2:.0f})" '
        f'text-anchor="middle">{ylabel}</text>\n'
        f'<text x="{m}" y="{height - m + 16}" font-size="11">{fmt(x0)}</text>\n'
        f'<text x="{width - m}" y="{height - m + 16}" font-size="11" text-anchor="end">{fmt(x1)}</text>\n'
        f'<text x="{m - 4}" y="{height - m}" font-size="11" text-anchor="end">{fmt(y0)}</text>\n'
        f'<text x="{m - 4}" y="{m + 4}" font-size="11" text-anchor="end">{fmt(y1)}</text>\n'
        "</svg>\n"
    )
