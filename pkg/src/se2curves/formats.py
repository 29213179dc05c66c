"""File formats: trajectory CSV, versioned JSON, and plain SVG overlays.

All writers go through :func:`atomic_write` (temp file in the target directory,
then ``os.replace``), so a crashed run never leaves a half-written file behind.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .integrate import Trajectory

SCHEMA = "se2-curves/1"

TRAJECTORY_COLUMNS = (
    "param", "x", "y", "theta", "p1", "p2", "p3", "h1", "h2", "h3",
    "H", "casimir_or_speed", "curvature", "cusp_flag",
)


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def fmt(v: float) -> str:
    return "%.17g" % v


# --- CSV ---------------------------------------------------------------------------------


def trajectory_table(traj: Trajectory) -> np.ndarray:
    """Rows in :data:`TRAJECTORY_COLUMNS` order. Theta is kept unwrapped, as integrated."""
    inv = traj.invariants
    second = inv["casimir"] if traj.kind.is_elastica else inv["sr_speed_sq"]
    return np.column_stack([
        traj.param,
        traj.y[:, 3], traj.y[:, 4], traj.y[:, 5],
        traj.momenta,
        traj.hamiltonians,
        inv["hamiltonian"], second,
        traj.curvature,
        traj.cusp_flags.astype(float),
    ])


def table_csv(columns: Sequence[str], rows: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def trajectory_csv(traj: Trajectory) -> str:
    rows = trajectory_table(traj)
    text = table_csv(TRAJECTORY_COLUMNS, rows)
    # the flag column is integral; print it without a decimal point
    return text if not len(rows) else _int_flags(text)


def _int_flags(text: str) -> str:
    lines = text.splitlines()
    out = [lines[0]]
    for line in lines[1:]:
        head, _, flag = line.rpartition(",")
        out.append(f"{head},{int(float(flag))}")
    return "\n".join(out) + "\n"


def read_table_csv(path_or_text: str | os.PathLike) -> dict[str, np.ndarray]:
    """Parse a CSV written by this module into float columns (``inf`` round-trips)."""
    p = Path(path_or_text) if not str(path_or_text).count("\n") else None
    text = p.read_text(encoding="utf-8") if p is not None else str(path_or_text)
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(v) for v in r] for r in reader if r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


# --- JSON --------------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # strict JSON has no infinities; they are spelled out as strings
        return v if math.isfinite(v) else repr(v)
    return v


def dumps(payload: dict) -> str:
    body = {"schema": SCHEMA, **payload}
    return json.dumps(_jsonable(body), indent=2, sort_keys=True, allow_nan=False) + "\n"


# --- SVG ---------------------------------------------------------------------------------

GEODESIC_STYLE = {"stroke": "green", "stroke-width": "2", "fill": "none"}
ELASTICA_STYLE = {"stroke": "red", "stroke-width": "2", "fill": "none", "stroke-dasharray": "8,5"}


@dataclass(frozen=True)
class Curve:
    xy: np.ndarray
    style: dict
    label: str = ""


def svg_document(curves: Iterable[Curve], size: float = 600.0, margin: float = 0.05) -> str:
    """One polyline per curve, y axis pointing up, uniform scale fitted to the bounding box."""
    curves = list(curves)
    pts = np.vstack([c.xy for c in curves]) if curves else np.zeros((1, 2))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = float(max(hi - lo)) or 1.0
    pad = margin * extent
    scale = size / (extent + 2 * pad)
    cx, cy = (lo + hi) / 2

    def to_px(xy):
        u = size / 2 + (xy[:, 0] - cx) * scale
        v = size / 2 - (xy[:, 1] - cy) * scale
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(u, v))

    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=f"{size:g}",
                      height=f"{size:g}", viewBox=f"0 0 {size:g} {size:g}")
    ET.SubElement(root, "rect", width="100%", height="100%", fill="white")
    for c in curves:
        attrs = dict(c.style)
        attrs["points"] = to_px(c.xy)
        line = ET.SubElement(root, "polyline", attrs)
        if c.label:
            ET.SubElement(line, "title").text = c.label
    return ET.tostring(root, encoding="unicode") + "\n"
