"""Bit-specified output formats: JSON reports, CSV tables, PGM rasters.

All writers are deterministic: fixed key order, shortest round-trip
float formatting, no timestamps. Complex values serialize as [re, im]
pairs in JSON and as separate re/im columns in CSV.
"""

from __future__ import annotations

import json
import math

import numpy as np


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.complexfloating,)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def json_report(obj) -> str:
    """Deterministic JSON text for a report object."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def format_float(x: float) -> str:
    return repr(float(x))


def cloud_csv(points, weights) -> str:
    """Point-cloud CSV: header re,im,weight; weights sum to 1 +- 1e-9."""
    weights = np.asarray(weights, dtype=float)
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"cloud weights sum to {total!r}, not 1")
    lines = ["re,im,weight"]
    for z, w in zip(points, weights):
        z = complex(z)
        lines.append(f"{format_float(z.real)},{format_float(z.imag)},{format_float(w)}")
    return "\n".join(lines) + "\n"


def measure_csv(measure) -> str:
    """Measure CSV; the infinity atom is encoded as inf,inf,w."""
    if abs(measure.mass - 1.0) > 1e-9:
        raise ValueError(f"measure mass {measure.mass!r} is not 1")
    lines = ["re,im,weight"]
    for z, w in zip(measure.points, measure.weights):
        z = complex(z)
        lines.append(f"{format_float(z.real)},{format_float(z.imag)},{format_float(w)}")
    if measure.inf_weight != 0.0:
        lines.append(f"inf,inf,{format_float(measure.inf_weight)}")
    return "\n".join(lines) + "\n"


def series_csv(coeffs) -> str:
    """Series CSV: rows k,re,im for the coefficients c_k."""
    lines = ["k,re,im"]
    for k, c in enumerate(coeffs):
        c = complex(c)
        lines.append(f"{k},{format_float(c.real)},{format_float(c.imag)}")
    return "\n".join(lines) + "\n"


def raster_hits(points, bbox, width: int, height: int) -> np.ndarray:
    """Row-major hit-count image of a point cloud over a bounding box.

    Row 0 is the top of the box (largest imaginary part). Counts scale
    linearly to maxval 255.
    """
    x0, x1, y0, y1 = bbox
    if not (x1 > x0 and y1 > y0):
        raise ValueError("bbox must satisfy x1 > x0 and y1 > y0")
    pts = np.asarray(points, dtype=np.complex128)
    cols = np.floor((pts.real - x0) / (x1 - x0) * width).astype(int)
    rows = np.floor((y1 - pts.imag) / (y1 - y0) * height).astype(int)
    keep = (cols >= 0) & (cols < width) & (rows >= 0) & (rows < height)
    counts = np.zeros((height, width), dtype=np.int64)
    np.add.at(counts, (rows[keep], cols[keep]), 1)
    peak = counts.max()
    if peak == 0:
        return counts.astype(np.uint8)
    return np.floor(counts * (255.0 / peak)).astype(np.uint8)


def pgm_bytes(image: np.ndarray) -> bytes:
    """Binary PGM (P5, maxval 255) encoding of a uint8 image."""
    if image.ndim != 2 or image.dtype != np.uint8:
        raise ValueError("need a 2-d uint8 image")
    height, width = image.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + image.tobytes()
