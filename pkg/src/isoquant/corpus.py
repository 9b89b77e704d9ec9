"""Named shape generators for batch evaluation.

Every generated shape carries a stable identifier such as
``rectangle(aspect=2)`` or ``random-fourier(seed=0,index=3)``.  Polygons are
produced with area pi; radial graphs are normalized nearly spherical sets.
The evaluator rescales everything to unit-ball volume anyway.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import geometry as geo
from .geometry import Polygon2D, RadialGraph2D, RadialGraph3D, Shape, polygon
from .spherical import fourier_mode, normalize, random_spherical


class CorpusSpecError(ValueError):
    """Invalid corpus specification."""


def _fmt(x) -> str:
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in x) + "]"
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return repr(x) if isinstance(x, float) else str(x)


def _ident(name: str, params: dict) -> str:
    if not params:
        return name
    return name + "(" + ",".join(f"{k}={_fmt(v)}" for k, v in params.items()) + ")"


def _as_list(x) -> list:
    return list(x) if isinstance(x, (list, tuple)) else [x]


def _area_pi(points: np.ndarray) -> Polygon2D:
    p = polygon(points)
    return geo.scale(p, math.sqrt(math.pi / geo.volume(p)))


# --------------------------------------------------------------------------
# primitive shapes
# --------------------------------------------------------------------------


def regular_ngon(sides: int, phase: float = 0.0) -> Polygon2D:
    if sides < 3:
        raise ValueError("a regular polygon needs at least 3 sides")
    t = phase + 2.0 * np.pi * np.arange(sides) / sides
    return _area_pi(np.column_stack([np.cos(t), np.sin(t)]))


def square() -> Polygon2D:
    h = math.sqrt(math.pi) / 2.0
    return polygon([[-h, -h], [h, -h], [h, h], [-h, h]])


def rectangle(aspect: float) -> Polygon2D:
    if aspect <= 0:
        raise CorpusSpecError("aspect must be positive")
    return _area_pi(np.array([[-aspect, -1.0], [aspect, -1.0], [aspect, 1.0], [-aspect, 1.0]]))


def ellipse(aspect: float, vertices: int = 1024) -> Polygon2D:
    if aspect <= 0 or vertices < 8:
        raise CorpusSpecError("ellipse needs aspect > 0 and at least 8 vertices")
    t = 2.0 * np.pi * np.arange(vertices) / vertices
    return _area_pi(np.column_stack([aspect * np.cos(t), np.sin(t)]))


def stadium(length: float, cap_vertices: int = 256) -> Polygon2D:
    """Two unit half-disks joined by straight sides of the given length."""
    if length < 0 or cap_vertices < 4:
        raise CorpusSpecError("stadium needs length >= 0 and at least 4 cap vertices")
    t = np.linspace(-np.pi / 2, np.pi / 2, cap_vertices + 1)
    right = np.column_stack([length / 2 + np.cos(t), np.sin(t)])
    left = np.column_stack([-length / 2 - np.cos(t), -np.sin(t)])
    pts = np.vstack([right, left])
    if length == 0:
        pts = np.vstack([right[:-1], left[:-1]])
    return _area_pi(pts)


def star(points: int = 5, inner: float = 0.5) -> Polygon2D:
    """Nonconvex star polygon with alternating radii 1 and ``inner``."""
    if points < 3 or not 0 < inner < 1:
        raise CorpusSpecError("star needs >= 3 points and 0 < inner < 1")
    t = np.pi * np.arange(2 * points) / points
    rad = np.where(np.arange(2 * points) % 2 == 0, 1.0, inner)
    return _area_pi(np.column_stack([rad * np.cos(t), rad * np.sin(t)]))


def l_shape(arm: float = 1.0) -> Polygon2D:
    """Unit square with an ``arm`` x ``arm`` square removed from a 2x2 block."""
    if not 0 < arm < 2:
        raise CorpusSpecError("l-shape arm must lie in (0, 2)")
    pts = np.array([[0, 0], [2, 0], [2, 2 - arm], [2 - arm, 2 - arm], [2 - arm, 2], [0, 2]], dtype=float)
    return _area_pi(pts - 1.0)


def zonal_3d(mode: int, amplitude: float, nlat: int = 32, nlon: int = 64) -> RadialGraph3D:
    """u = amplitude * P_mode(cos theta) on the lat-long grid."""
    theta, _, _ = geo.sphere_grid(nlat, nlon)
    c = np.zeros(mode + 1)
    c[mode] = 1.0
    u = amplitude * np.polynomial.legendre.legval(np.cos(theta), c)
    return RadialGraph3D(np.repeat(u[:, None], nlon, axis=1))


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------


def rotate(shape: Shape, angle: float) -> Shape:
    """Rotate a planar shape about the origin."""
    c, s = math.cos(angle), math.sin(angle)
    if isinstance(shape, Polygon2D):
        R = np.array([[c, -s], [s, c]])
        return polygon(shape.vertices @ R.T)
    if isinstance(shape, RadialGraph2D):
        # u(theta - angle): (a_k, b_k) rotate by k * angle
        k = np.arange(1, shape.kmax + 1)
        ck, sk = np.cos(k * angle), np.sin(k * angle)
        return RadialGraph2D(shape.a0, shape.a * ck - shape.b * sk, shape.a * sk + shape.b * ck)
    raise CorpusSpecError("rotation is only supported for planar shapes")


def _apply_transforms(shape: Shape, item: dict, resolution: int) -> Shape:
    if "rotate" in item:
        shape = rotate(shape, float(item["rotate"]))
    if "dilate" in item:
        shape = geo.scale(shape, float(item["dilate"]))
    if "translate" in item:
        shape = geo.translate(shape, np.asarray(item["translate"], dtype=float), resolution=resolution)
    return shape


# --------------------------------------------------------------------------
# spec
# --------------------------------------------------------------------------

TRANSFORM_KEYS = ("rotate", "dilate", "translate")


@dataclass
class CorpusItem:
    ident: str
    shape: Optional[Shape]
    error: Optional[str] = None


@dataclass
class CorpusSpec:
    """A list of named generators plus evaluation settings.

    Each generator is a dict with a ``name`` and its parameters; list-valued
    parameters sweep.  Optional ``rotate``, ``dilate`` and ``translate`` keys
    produce transformed variants.
    """

    generators: list[dict] = field(default_factory=list)
    N: Optional[int] = None
    n: int = 2
    seed: int = 0
    count: int = 1
    translate_resolution: int = 4096

    @classmethod
    def from_dict(cls, obj) -> "CorpusSpec":
        if not isinstance(obj, dict):
            raise CorpusSpecError("corpus spec must be a JSON object")
        gens = obj.get("generators")
        if gens is None:
            if "generator" not in obj:
                raise CorpusSpecError("corpus spec needs 'generators' or 'generator'")
            g = {k: v for k, v in obj.items() if k not in ("generator", "N", "n", "seed", "count")}
            gens = [dict(name=obj["generator"], **g)]
        if not isinstance(gens, list) or not all(isinstance(g, dict) and "name" in g for g in gens):
            raise CorpusSpecError("each generator must be an object with a 'name'")
        try:
            return cls(
                generators=gens,
                N=None if obj.get("N") is None else int(obj["N"]),
                n=int(obj.get("n", 2)),
                seed=int(obj.get("seed", 0)),
                count=int(obj.get("count", 1)),
            )
        except (TypeError, ValueError) as exc:
            raise CorpusSpecError(f"invalid corpus setting: {exc}") from None

    def items(self) -> list[CorpusItem]:
        if self.n not in (2, 3):
            raise CorpusSpecError("dimension must be 2 or 3")
        out: list[CorpusItem] = []
        for gen in self.generators:
            out.extend(self._expand(gen))
        return out

    def _expand(self, gen: dict) -> list[CorpusItem]:
        name = gen["name"]
        if name not in GENERATORS:
            raise CorpusSpecError(f"unknown generator {name!r}")
        params = {k: v for k, v in gen.items() if k != "name" and k not in TRANSFORM_KEYS}
        transforms = {k: gen[k] for k in TRANSFORM_KEYS if k in gen}
        items = []
        for ident, build in GENERATORS[name](self, params):
            if transforms:
                ident += "@" + ",".join(f"{k}={_fmt(v)}" for k, v in transforms.items())
            try:
                shape = build()
                if self.n != shape.n:
                    raise CorpusSpecError(f"{ident} is {shape.n}D but the corpus is {self.n}D")
                shape = _apply_transforms(shape, transforms, self.translate_resolution)
                items.append(CorpusItem(ident, shape))
            except CorpusSpecError:
                raise
            except (ValueError, ArithmeticError) as exc:
                items.append(CorpusItem(ident, None, f"invalid-shape: {exc}"))
        return items


Builder = Callable[[], Shape]


def _sweep(name: str, params: dict, keys: Sequence[str], make) -> list[tuple[str, Builder]]:
    """Cartesian sweep over the listed parameters in the given order."""
    values = [_as_list(params[k]) for k in keys]
    extra = {k: v for k, v in params.items() if k not in keys}
    out = []
    for combo in itertools.product(*values):
        kw = dict(zip(keys, combo))
        out.append((_ident(name, {**kw, **extra}), lambda kw=kw: make(**kw, **extra)))
    return out


def _need(params: dict, *keys: str) -> None:
    for k in keys:
        if k not in params:
            raise CorpusSpecError(f"generator parameter {k!r} is required")


def _gen_ngon(spec, p):
    _need(p, "sides")
    return _sweep("regular-ngon", p, ["sides"], lambda sides, **kw: regular_ngon(int(sides), **kw))


def _gen_square(spec, p):
    return [("square", square)]


def _gen_rectangle(spec, p):
    _need(p, "aspect")
    return _sweep("rectangle", p, ["aspect"], lambda aspect: rectangle(float(aspect)))


def _gen_ellipse(spec, p):
    _need(p, "aspect")
    return _sweep("ellipse", p, ["aspect"], lambda aspect, **kw: ellipse(float(aspect), **kw))


def _gen_stadium(spec, p):
    _need(p, "length")
    return _sweep("stadium", p, ["length"], lambda length, **kw: stadium(float(length), **kw))


def _gen_star(spec, p):
    p = {"points": 5, "inner": 0.5, **p}
    return _sweep("star", p, ["points", "inner"], lambda points, inner: star(int(points), float(inner)))


def _gen_lshape(spec, p):
    p = {"arm": 1.0, **p}
    return _sweep("l-shape", p, ["arm"], lambda arm: l_shape(float(arm)))


def _gen_perturbed(spec, p):
    _need(p, "mode", "amplitude")

    def make(mode, amplitude, **kw):
        if spec.n == 2:
            return normalize(fourier_mode(int(mode), float(amplitude), **kw)).u
        return normalize(zonal_3d(int(mode), float(amplitude), **kw)).u

    return _sweep("perturbed-ball", p, ["mode", "amplitude"], make)


def _gen_random(spec, p):
    seed = int(p.get("seed", spec.seed))
    count = int(p.get("count", spec.count))
    modes = p.get("modes", [2, 8])
    scale = float(p.get("scale", 0.05))
    if spec.n != 2:
        raise CorpusSpecError("random-fourier generates planar shapes only")
    if not (isinstance(modes, list) and len(modes) == 2):
        raise CorpusSpecError("modes must be [kmin, kmax]")
    mrange = range(int(modes[0]), int(modes[1]) + 1)
    out = []
    for i in range(count):
        ident = _ident("random-fourier", {"seed": seed, "index": i, "scale": scale})
        out.append((ident, lambda i=i: normalize(random_spherical(seed, i, mrange, scale)).u))
    return out


GENERATORS = {
    "regular-ngon": _gen_ngon,
    "square": _gen_square,
    "rectangle": _gen_rectangle,
    "ellipse": _gen_ellipse,
    "stadium": _gen_stadium,
    "star": _gen_star,
    "l-shape": _gen_lshape,
    "perturbed-ball": _gen_perturbed,
    "random-fourier": _gen_random,
}


def default_corpus(seed: int = 0) -> CorpusSpec:
    """The standard planar corpus: 37 shapes covering corners, elongation,
    nonconvexity and the nearly spherical regime."""
    return CorpusSpec.from_dict(
        {
            "seed": seed,
            "generators": [
                {"name": "regular-ngon", "sides": list(range(3, 13))},
                {"name": "square"},
                {"name": "rectangle", "aspect": [1.5, 2.0, 4.0]},
                {"name": "ellipse", "aspect": [1.2, 2.0, 3.0]},
                {"name": "stadium", "length": [0.5, 1.0, 2.0]},
                {"name": "star", "points": [5, 7], "inner": 0.6},
                {"name": "l-shape"},
                {"name": "perturbed-ball", "mode": [2, 3, 5], "amplitude": [0.05, 0.1]},
                {"name": "random-fourier", "count": 6, "modes": [2, 8], "scale": 0.1},
                {"name": "regular-ngon", "sides": 6, "translate": [0.7, -0.3]},
                {"name": "rectangle", "aspect": 2.0, "rotate": 0.4},
            ],
        }
    )
