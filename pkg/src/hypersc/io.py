"""File formats: points (JSON), results (JSON) and per-iteration traces (CSV).

JSON output is byte-deterministic: keys keep insertion order and every float
is written with 17 significant digits.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math

import numpy as np

from .errors import UsageError, ValidationError
from .manifolds import Hyperboloid, from_coords

TRACE_HEADER = ("iter", "phase", "t", "lambda", "objective", "gap_bound")


def format_float(v):
    if not math.isfinite(v):
        return "null"
    return format(v, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON text with 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"file not found: {path}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


# -- points -----------------------------------------------------------------


def parse_points(doc):
    """Validate a points document; returns ``(points on the sheet, kappa, dim)``.

    ``"hyperboloid"`` points are ambient coordinates on the unit sheet;
    ``"tangent"`` points are coordinates in the orthonormal frame at the apex
    and are mapped by the exponential map, so their norm is the distance
    from the apex at curvature ``-kappa``.
    """
    if not isinstance(doc, dict):
        raise UsageError("points file must hold a JSON object")
    model = doc.get("model")
    if model not in ("hyperboloid", "tangent"):
        raise UsageError('"model" must be "hyperboloid" or "tangent"')
    kappa = doc.get("kappa", 1.0)
    dim = doc.get("dim")
    if not isinstance(kappa, (int, float)) or isinstance(kappa, bool) or not (kappa > 0 and math.isfinite(kappa)):
        raise UsageError('"kappa" must be a positive number')
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise UsageError('"dim" must be a positive integer')
    raw = doc.get("points")
    if not isinstance(raw, list) or not raw:
        raise UsageError('"points" must be a non-empty list')
    H = Hyperboloid(dim, float(kappa))
    want = dim + 1 if model == "hyperboloid" else dim
    out = []
    o = H.origin()
    for i, p in enumerate(raw):
        if not isinstance(p, list) or len(p) != want:
            raise UsageError(f"point {i}: expected a list of {want} numbers")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p):
            raise UsageError(f"point {i}: entries must be numbers")
        v = np.array(p, dtype=float)
        if not np.all(np.isfinite(v)):
            raise UsageError(f"point {i}: entries must be finite")
        if model == "hyperboloid":
            try:
                out.append(H.check_point(v))
            except (ValidationError, UsageError) as exc:
                raise UsageError(f"point {i}: {exc}") from exc
        else:
            out.append(H.exp(o, from_coords(H, o, v)))
    return np.array(out), float(kappa), dim


def read_points(path):
    return parse_points(read_json(path))


def points_document(points, kappa, model="hyperboloid"):
    pts = np.asarray(points, float)
    return {"model": model, "kappa": float(kappa), "dim": int(pts.shape[1] - 1), "points": pts.tolist()}


# -- results and traces -------------------------------------------------------


def result_document(solution, config):
    return {
        "method": solution.method,
        "center": np.asarray(solution.center, float).tolist(),
        "radius": float(solution.radius),
        "s": float(solution.s),
        "gap_certificate": float(solution.gap_certificate),
        "radius_error_bound": float(solution.radius_error_bound),
        "iterations": dict(solution.iterations),
        "config_echo": config,
    }


def read_result(path):
    doc = read_json(path)
    for key in ("center", "radius", "s"):
        if key not in doc:
            raise UsageError(f"result file lacks {key!r}")
    return doc


def trace_csv(records):
    """CSV text for path-following records (header ``iter,phase,t,lambda,objective,gap_bound``)."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for r in records:
        gap = "" if r.gap_bound is None else format_float(r.gap_bound)
        w.writerow([r.iter, r.phase, format_float(r.t), format_float(r.decrement), format_float(r.objective), gap])
    return buf.getvalue()


def write_trace(path, records):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trace_csv(records))
