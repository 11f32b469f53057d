"""Delimited and JSON report files.

CSV: ',' separator, '.' decimal, '#' comment lines, floats in shortest
round-trip form, undefined values as empty fields.  JSON: UTF-8, sorted keys.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError

BOUNDARY_HEADER = ("g", "lambda1", "lambda2", "h1", "h2", "e0", "gap", "kappa_spectral", "kappa_fd", "degenerate")
EXACT_HEADER = ("g", "m", "h1", "h2", "kappa")
BRANCH_HEADER = ("k", "g", "h1", "h2", "energy")


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def parse_float(s):
    s = s.strip()
    return math.nan if s == "" else float(s)


def config_line(config):
    return "# config: " + json.dumps(config, sort_keys=True, separators=(",", ":"))


def render_csv(header, rows, config=None):
    buf = io.StringIO()
    if config is not None:
        buf.write(config_line(config) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_csv(path):
    """``(header, rows)`` of string fields, skipping '#' comment lines."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise ValidationError(f"{path}: no CSV header found")
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if not math.isfinite(x) else x
    return obj


def render_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def boundary_rows(curve):
    fd = curve.kappa_fd()
    for p, kfd in zip(curve.points, fd):
        yield (p.g, p.normal[0], p.normal[1], p.h1, p.h2, p.e0, p.gap, p.kappa_spectral, kfd, p.degenerate)


def render_boundary(curve, config=None):
    return render_csv(BOUNDARY_HEADER, boundary_rows(curve), config)


def read_boundary(path):
    """Rebuild a BoundaryCurve from a boundary CSV."""
    from .moduli import BoundaryCurve, BoundaryPoint

    header, rows = read_csv(path)
    if tuple(header) != BOUNDARY_HEADER:
        raise ValidationError(f"{path}: expected boundary header {','.join(BOUNDARY_HEADER)}")
    points = []
    try:
        for r in rows:
            degenerate = r[9].strip().lower() == "true"
            points.append(
                BoundaryPoint(
                    g=float(r[0]),
                    normal=(float(r[1]), float(r[2])),
                    h1=float(r[3]),
                    h2=float(r[4]),
                    e0=float(r[5]),
                    gap=parse_float(r[6]),
                    kappa_spectral=parse_float(r[7]),
                    degenerate=degenerate,
                    multiplicity=2 if degenerate else 1,
                )
            )
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed boundary row ({exc})") from exc
    return BoundaryCurve(tuple(points), metadata={"source": str(path)})
