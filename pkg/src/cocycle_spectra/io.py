"""Stable file formats for curves and reports.

CSV: ``.`` decimal separator, 17 significant digits, ``\\n`` line ends and
``null`` for empty (``-inf``) bins. JSON: sorted keys, non-finite floats
written as ``null``.
"""

import csv
from dataclasses import asdict
import json
import math

import numpy as np

CURVE_COLUMNS = ("grid", "value", "populated_count")


def fmt(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def parse(text):
    return -math.inf if text == "null" else float(text)


def clean(obj):
    """Recursively turn numpy scalars/arrays into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(clean(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _write_rows(path, grid, values, counts):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CURVE_COLUMNS)
        for g, v, c in zip(grid, values, counts):
            out.writerow([fmt(g), fmt(v), "" if c is None else int(c)])


def write_spectrum_csv(curve, path):
    counts = curve.counts if curve.counts is not None else [None] * len(curve.alpha_grid)
    _write_rows(path, curve.alpha_grid, curve.values, counts)


def write_pressure_csv(p, path):
    """Pressure rows; ``populated_count`` is the size of the restricted word class."""
    _write_rows(path, p.q_grid, p.values, [p.word_count] * len(p.q_grid))


def read_curve_csv(path):
    """``(grid, values, counts)`` arrays; missing counts come back as -1."""
    grid, values, counts = [], [], []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        if tuple(next(rows)) != CURVE_COLUMNS:
            raise ValueError(f"{path}: unexpected header")
        for g, v, c in rows:
            grid.append(parse(g))
            values.append(parse(v))
            counts.append(int(c) if c else -1)
    return np.array(grid), np.array(values), np.array(counts)


def spectrum_meta(curve):
    meta = {"n": curve.n, "delta": curve.delta, "source": curve.source}
    meta.update(curve.meta)
    if curve.endpoint_flags is not None:
        meta["endpoint_flags"] = curve.endpoint_flags
    return meta


def pressure_meta(p):
    return {"n": p.n, "restriction": p.restriction, "N": p.N, "delta": p.delta,
            "slope_range": p.slope_range, "word_count": p.word_count, **p.meta}


def summary_dict(s):
    return asdict(s)
