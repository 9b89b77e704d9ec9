"""Reading and writing shape files.

A shape file is one JSON object::

    {"kind": "polygon2d", "vertices": [[x, y], ...]}
    {"kind": "radial2d", "fourier": {"a0": 0.0, "a": [...], "b": [...]}}
    {"kind": "radial3d", "grid": {"nlat": 16, "nlon": 32, "values": [...]}}

Grid values are row-major (colatitude index first).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import Polygon2D, RadialGraph2D, RadialGraph3D, Shape, polygon


class ShapeFormatError(ValueError):
    """Malformed or invalid shape description."""


def _parse(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShapeFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def shape_from_dict(obj) -> Shape:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ShapeFormatError("shape must be a JSON object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "polygon2d":
            return polygon(np.asarray(obj["vertices"], dtype=float))
        if kind == "radial2d":
            f = obj["fourier"]
            return RadialGraph2D(float(f.get("a0", 0.0)), f.get("a", []), f.get("b", []))
        if kind == "radial3d":
            g = obj["grid"]
            nlat, nlon = int(g["nlat"]), int(g["nlon"])
            vals = np.asarray(g["values"], dtype=float)
            if vals.size != nlat * nlon:
                raise ValueError(f"grid has {vals.size} values, expected {nlat}x{nlon}")
            return RadialGraph3D(vals.reshape(nlat, nlon))
    except KeyError as exc:
        raise ShapeFormatError(f"{kind} shape is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ShapeFormatError(f"invalid {kind} shape: {exc}") from None
    raise ShapeFormatError(f"unknown shape kind {kind!r}")


def shape_to_dict(shape: Shape) -> dict:
    if isinstance(shape, Polygon2D):
        return {"kind": "polygon2d", "vertices": shape.vertices.tolist()}
    if isinstance(shape, RadialGraph2D):
        return {"kind": "radial2d", "fourier": {"a0": shape.a0, "a": shape.a.tolist(), "b": shape.b.tolist()}}
    if isinstance(shape, RadialGraph3D):
        return {
            "kind": "radial3d",
            "grid": {"nlat": shape.nlat, "nlon": shape.nlon, "values": shape.values.ravel().tolist()},
        }
    raise TypeError(f"not a shape: {type(shape).__name__}")


def loads_shape(text: str, source: str = "<string>") -> Shape:
    return shape_from_dict(_parse(text, source))


def load_shape(path) -> Shape:
    path = Path(path)
    return loads_shape(path.read_text(encoding="utf-8"), str(path))


def load_json(path):
    """Parse a JSON file, reporting syntax errors with line and column."""
    path = Path(path)
    return _parse(path.read_text(encoding="utf-8"), str(path))


def save_shape(shape: Shape, path) -> None:
    Path(path).write_text(json.dumps(shape_to_dict(shape)) + "\n", encoding="utf-8")
