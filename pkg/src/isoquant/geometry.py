"""Shape representations and measure-theoretic primitives.

Three concrete set representations are supported:

* :class:`Polygon2D` -- a simple, counterclockwise vertex loop.
* :class:`RadialGraph2D` -- a star-shaped planar set with boundary
  ``r(theta) = 1 + u(theta)``, ``u`` a trigonometric polynomial.
* :class:`RadialGraph3D` -- a star-shaped solid with boundary ``(1 + u(z)) z``,
  ``u`` sampled on a Gauss-Legendre latitude by uniform longitude grid.

Everything downstream (deficit, Riesz potential, asymmetry indices) is built on
the functions in this module: :func:`volume`, :func:`perimeter`,
:func:`boundary_quadrature`, :func:`barycenter`, :func:`sym_diff_with_ball`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .clip import polygon_disk_area, polygon_is_simple

DEFAULT_N_2D = 4096
DEFAULT_GRID_3D = (128, 256)
MIN_QUADRATURE_NODES = 16


def ball_volume(n: int, r: float = 1.0) -> float:
    """Volume of the n-ball of radius ``r`` (omega_n r^n)."""
    _check_dim(n)
    return (math.pi if n == 2 else 4.0 * math.pi / 3.0) * r**n


def ball_perimeter(n: int, r: float = 1.0) -> float:
    return n * ball_volume(n) * r ** (n - 1)


def _check_dim(n: int) -> None:
    if n not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {n}")


# --------------------------------------------------------------------------
# representations
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polygon2D:
    """Simple positively oriented polygon.

    ``vertices`` is an ``(m, 2)`` array without the closing repeat.  Translations
    are stored in ``offset`` so that translating by ``v`` and then ``-v``
    returns the original coordinates bit for bit.
    """

    base: np.ndarray
    offset: np.ndarray = field(default_factory=lambda: np.zeros(2))
    validate: bool = field(default=True, repr=False)

    kind = "polygon2d"
    n = 2

    def __post_init__(self) -> None:
        base = np.array(self.base, dtype=float)
        if base.ndim != 2 or base.shape[1] != 2 or base.shape[0] < 3:
            raise ValueError("polygon needs an (m, 2) vertex array with m >= 3")
        if not np.all(np.isfinite(base)):
            raise ValueError("polygon vertices must be finite")
        base.setflags(write=False)
        offset = np.array(self.offset, dtype=float).reshape(2)
        offset.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "offset", offset)
        area = _shoelace(base)
        scale = float(np.max(np.abs(base - base.mean(axis=0)))) ** 2
        if area <= 1e-14 * max(scale, 1e-300):
            if area < -1e-14 * scale:
                raise ValueError("polygon must be counterclockwise (positive orientation)")
            raise ValueError("degenerate polygon (zero area)")
        if self.validate and not polygon_is_simple(base):
            raise ValueError("polygon is self-intersecting")

    @property
    def vertices(self) -> np.ndarray:
        if not self.offset.any():
            return self.base
        return self.base + self.offset

    @property
    def edges(self) -> np.ndarray:
        v = self.vertices
        return np.roll(v, -1, axis=0) - v


def polygon(points, validate: bool = True) -> Polygon2D:
    """Build a :class:`Polygon2D`, reversing clockwise input."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 2 and len(pts) > 3 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if pts.ndim == 2 and pts.shape[0] >= 3 and _shoelace(pts) < 0:
        pts = pts[::-1]
    return Polygon2D(pts, validate=validate)


@dataclass(frozen=True, eq=False)
class RadialGraph2D:
    """Planar set bounded by ``r(theta) = 1 + u(theta)``.

    ``u(theta) = a0 + sum_k a[k-1] cos(k theta) + b[k-1] sin(k theta)``.
    """

    a0: float
    a: np.ndarray
    b: np.ndarray

    kind = "radial2d"
    n = 2

    def __post_init__(self) -> None:
        a = np.atleast_1d(np.array(self.a, dtype=float))
        b = np.atleast_1d(np.array(self.b, dtype=float))
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("Fourier coefficient arrays must be one-dimensional")
        k = max(len(a), len(b))
        a = np.pad(a, (0, k - len(a)))
        b = np.pad(b, (0, k - len(b)))
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and math.isfinite(self.a0)):
            raise ValueError("Fourier coefficients must be finite")
        _, r, _ = self.sample(max(256, 8 * self.kmax + 8))
        if np.min(r) <= 0.0:
            raise ValueError("radial graph must satisfy 1 + u > 0")

    @property
    def kmax(self) -> int:
        return len(self.a)

    def sample(self, N: int):
        """Return ``theta, r, dr/dtheta`` on ``N`` uniform angles."""
        if N <= 2 * self.kmax:
            raise ValueError(f"need more than {2 * self.kmax} samples for K={self.kmax}")
        k = np.arange(1, self.kmax + 1)
        c = np.zeros(N // 2 + 1, dtype=complex)
        c[0] = self.a0 * N
        c[1 : self.kmax + 1] = (self.a - 1j * self.b) * (N / 2)
        u = np.fft.irfft(c, N)
        dc = np.zeros_like(c)
        dc[1 : self.kmax + 1] = c[1 : self.kmax + 1] * (1j * k)
        du = np.fft.irfft(dc, N)
        theta = 2.0 * np.pi * np.arange(N) / N
        return theta, 1.0 + u, du

    def u(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.kmax + 1)
        kt = np.multiply.outer(theta, k)
        return self.a0 + np.cos(kt) @ self.a + np.sin(kt) @ self.b

    def du(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.kmax + 1)
        kt = np.multiply.outer(theta, k)
        return -np.sin(kt) @ (k * self.a) + np.cos(kt) @ (k * self.b)

    def default_n(self) -> int:
        return max(DEFAULT_N_2D, 8 * self.kmax + 8)


@lru_cache(maxsize=32)
def sphere_grid(nlat: int, nlon: int):
    """Gauss-Legendre colatitudes by uniform longitudes on the unit sphere.

    Returns ``(theta, phi, weights)`` with ``weights`` of shape ``(nlat, nlon)``
    integrating exactly the spherical harmonics of degree < ``2*nlat``.
    """
    x, w = np.polynomial.legendre.leggauss(nlat)
    x, w = x[::-1], w[::-1]  # colatitude ascending from the north pole
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(nlon) / nlon
    weights = np.outer(w, np.full(nlon, 2.0 * np.pi / nlon))
    for arr in (theta, phi, weights):
        arr.setflags(write=False)
    return theta, phi, weights


def sphere_directions(nlat: int, nlon: int) -> np.ndarray:
    theta, phi, _ = sphere_grid(nlat, nlon)
    st = np.sin(theta)[:, None]
    return np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], np.broadcast_to(np.cos(theta)[:, None], (nlat, nlon))],
        axis=-1,
    )


@dataclass(frozen=True, eq=False)
class RadialGraph3D:
    """Solid bounded by ``(1 + u(z)) z`` with ``u`` on a lat-long grid.

    ``values[i, j]`` is ``u`` at Gauss-Legendre colatitude ``i`` and longitude
    ``2 pi j / nlon``.
    """

    values: np.ndarray

    kind = "radial3d"
    n = 3

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] < 4 or vals.shape[1] < 8:
            raise ValueError("3D grid must be (nlat >= 4, nlon >= 8)")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        if np.min(1.0 + vals) <= 0.0:
            raise ValueError("radial graph must satisfy 1 + u > 0")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def nlat(self) -> int:
        return self.values.shape[0]

    @property
    def nlon(self) -> int:
        return self.values.shape[1]

    def tangential_gradient(self) -> np.ndarray:
        """Tangential gradient of ``u`` at the grid nodes, shape ``(nlat, nlon, 3)``.

        Second-order finite differences in colatitude (non-uniform nodes);
        spectral differentiation in longitude.
        """
        theta, phi, _ = sphere_grid(self.nlat, self.nlon)
        u = self.values
        u_t = np.gradient(u, theta, axis=0, edge_order=2)
        k = np.fft.rfftfreq(self.nlon, d=1.0 / self.nlon)
        spec = np.fft.rfft(u, axis=1) * (1j * k)[None, :]
        if self.nlon % 2 == 0:
            spec[:, -1] = 0.0
        u_p = np.fft.irfft(spec, self.nlon, axis=1)
        ct, st = np.cos(theta)[:, None], np.sin(theta)[:, None]
        cp, sp = np.cos(phi)[None, :], np.sin(phi)[None, :]
        e_theta = np.stack([ct * cp, ct * sp, np.broadcast_to(-st, u.shape)], axis=-1)
        e_phi = np.stack([np.broadcast_to(-sp, u.shape), np.broadcast_to(cp, u.shape), np.zeros(u.shape)], axis=-1)
        return u_t[..., None] * e_theta + (u_p / st)[..., None] * e_phi

    def interpolate(self, directions: np.ndarray) -> np.ndarray:
        """Evaluate ``u`` at unit vectors (cubic in colatitude/longitude)."""
        return grid_interpolate(self.values, directions)


def grid_interpolate(values: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Cubic interpolation of lat-long grid data at arbitrary directions."""
    from scipy.interpolate import RegularGridInterpolator

    nlat, nlon = values.shape
    theta, phi, _ = sphere_grid(nlat, nlon)
    # periodic padding in longitude; across a pole by reflection to phi + pi
    pad = 3
    lon = np.concatenate([phi[-pad:] - 2 * np.pi, phi, phi[:pad] + 2 * np.pi])
    vals = np.concatenate([values[:, -pad:], values, values[:, :pad]], axis=1)
    if nlon % 2 == 0:
        half = nlon // 2
        north = np.roll(vals[:pad][::-1], half, axis=1)
        south = np.roll(vals[-pad:][::-1], half, axis=1)
        colat = np.concatenate([-theta[:pad][::-1], theta, 2 * np.pi - theta[-pad:][::-1]])
        vals = np.concatenate([north, vals, south], axis=0)
    else:
        colat = theta
    interp = RegularGridInterpolator((colat, lon), vals, method="cubic", bounds_error=False, fill_value=None)
    d = np.asarray(directions, dtype=float)
    t = np.arccos(np.clip(d[..., 2] / np.linalg.norm(d, axis=-1), -1.0, 1.0))
    p = np.mod(np.arctan2(d[..., 1], d[..., 0]), 2 * np.pi)
    return interp(np.stack([t, p], axis=-1))


Shape = Union[Polygon2D, RadialGraph2D, RadialGraph3D]


@dataclass(frozen=True)
class BallSpec:
    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        c = np.array(self.center, dtype=float).reshape(-1)
        _check_dim(len(c))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))


def matched_ball(shape: Shape, center=None) -> BallSpec:
    """Ball with the same volume as ``shape``."""
    if center is None:
        center = np.zeros(shape.n)
    return BallSpec(center, volume_radius(shape))


@dataclass(frozen=True, eq=False)
class BoundaryQuadrature:
    """Sampled reduced boundary: points, outward unit normals, positive weights."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    @property
    def N(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def total(self) -> float:
        return float(np.sum(self.weights))


# --------------------------------------------------------------------------
# primitives
# --------------------------------------------------------------------------


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def volume(shape: Shape, N: int | None = None) -> float:
    """Lebesgue measure of the set."""
    if isinstance(shape, Polygon2D):
        return _shoelace(shape.vertices)
    if isinstance(shape, RadialGraph2D):
        # (1+u)^2 has degree 2K, so any N > 2K integrates it exactly
        N = N or max(256, 4 * shape.kmax + 4)
        _, r, _ = shape.sample(N)
        return float(0.5 * np.sum(r**2) * (2.0 * np.pi / N))
    if isinstance(shape, RadialGraph3D):
        _, _, w = sphere_grid(shape.nlat, shape.nlon)
        return float(np.sum(w * (1.0 + shape.values) ** 3) / 3.0)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def volume_radius(shape: Shape) -> float:
    """Radius r with |B_r| = |E|."""
    return (volume(shape) / ball_volume(shape.n)) ** (1.0 / shape.n)


def perimeter(shape: Shape, N: int | None = None) -> float:
    if isinstance(shape, Polygon2D):
        return float(np.sum(np.hypot(*shape.edges.T)))
    if isinstance(shape, RadialGraph2D):
        N = N or shape.default_n()
        _, r, dr = shape.sample(N)
        return float(np.sum(np.hypot(r, dr)) * (2.0 * np.pi / N))
    if isinstance(shape, RadialGraph3D):
        _, _, w = sphere_grid(shape.nlat, shape.nlon)
        r = 1.0 + shape.values
        g2 = np.sum(shape.tangential_gradient() ** 2, axis=-1)
        return float(np.sum(w * r * np.sqrt(r**2 + g2)))
    raise TypeError(f"unsupported shape {type(shape).__name__}")


@lru_cache(maxsize=64)
def _gauss(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (x + 1.0), 0.5 * w


def boundary_quadrature(shape: Shape, N: int | None = None) -> BoundaryQuadrature:
    """Nodes, outward unit normals and weights on the boundary.

    Polygons get Gauss-Legendre points on each edge, allotted in proportion to
    edge length (at least two per edge).  2D radial graphs use the uniform
    periodic trapezoid rule; 3D radial graphs the lat-long product grid, in
    which case ``N`` is ignored.
    """
    if isinstance(shape, RadialGraph3D):
        return _quad_radial3d(shape)
    if N is None:
        N = shape.default_n() if isinstance(shape, RadialGraph2D) else DEFAULT_N_2D
    if N < MIN_QUADRATURE_NODES:
        raise ValueError(f"quadrature needs N >= {MIN_QUADRATURE_NODES}, got {N}")
    if isinstance(shape, Polygon2D):
        return _quad_polygon(shape, N)
    if isinstance(shape, RadialGraph2D):
        theta, r, dr = shape.sample(N)
        c, s = np.cos(theta), np.sin(theta)
        pts = np.stack([r * c, r * s], axis=1)
        speed = np.hypot(r, dr)
        # outward normal (r e_r - r' e_theta) / |.|
        nx = (r * c + dr * s) / speed
        ny = (r * s - dr * c) / speed
        return BoundaryQuadrature(pts, np.stack([nx, ny], axis=1), speed * (2.0 * np.pi / N))
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _quad_polygon(shape: Polygon2D, N: int) -> BoundaryQuadrature:
    v = shape.vertices
    e = shape.edges
    length = np.hypot(e[:, 0], e[:, 1])
    normal = np.stack([e[:, 1], -e[:, 0]], axis=1) / length[:, None]
    counts = np.maximum(2, np.rint(N * length / length.sum()).astype(int))
    pts, nrm, wts = [], [], []
    for k in np.unique(counts):
        idx = np.flatnonzero(counts == k)
        t, w = _gauss(int(k))
        p = v[idx, None, :] + t[None, :, None] * e[idx, None, :]
        pts.append((idx, p.reshape(-1, 2)))
        nrm.append(np.repeat(normal[idx], k, axis=0))
        wts.append((length[idx, None] * w[None, :]).reshape(-1))
    # restore edge order so results do not depend on grouping
    order = np.argsort(np.concatenate([np.repeat(i, counts[i]) for i, _ in pts]), kind="stable")
    points = np.concatenate([p for _, p in pts])[order]
    return BoundaryQuadrature(points, np.concatenate(nrm)[order], np.concatenate(wts)[order])


def _quad_radial3d(shape: RadialGraph3D) -> BoundaryQuadrature:
    _, _, w = sphere_grid(shape.nlat, shape.nlon)
    z = sphere_directions(shape.nlat, shape.nlon)
    r = 1.0 + shape.values
    grad = shape.tangential_gradient()
    g2 = np.sum(grad**2, axis=-1)
    root = np.sqrt(r**2 + g2)
    normal = (r[..., None] * z - grad) / root[..., None]
    return BoundaryQuadrature(
        (r[..., None] * z).reshape(-1, 3),
        normal.reshape(-1, 3),
        (w * r * root).reshape(-1),
    )


def barycenter(shape: Shape) -> np.ndarray:
    """(1/|E|) times the integral of x over E."""
    if isinstance(shape, Polygon2D):
        v = shape.base
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        area = 0.5 * cross.sum()
        c = ((v + w) * cross[:, None]).sum(axis=0) / (6.0 * area)
        return c + shape.offset
    if isinstance(shape, RadialGraph2D):
        N = max(256, 8 * shape.kmax + 8)
        theta, r, _ = shape.sample(N)
        m = np.array([np.sum(r**3 * np.cos(theta)), np.sum(r**3 * np.sin(theta))]) / 3.0
        return m * (2.0 * np.pi / N) / volume(shape)
    if isinstance(shape, RadialGraph3D):
        _, _, w = sphere_grid(shape.nlat, shape.nlon)
        z = sphere_directions(shape.nlat, shape.nlon)
        r = 1.0 + shape.values
        m = np.einsum("ij,ijk->k", w * r**4, z) / 4.0
        return m / volume(shape)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def scale(shape: Shape, lam: float) -> Shape:
    """Dilate the set about the origin by ``lam > 0``."""
    if not lam > 0:
        raise ValueError("scale factor must be positive")
    if isinstance(shape, Polygon2D):
        return Polygon2D(shape.vertices * lam, validate=False)
    if isinstance(shape, RadialGraph2D):
        return RadialGraph2D(lam * (1.0 + shape.a0) - 1.0, lam * shape.a, lam * shape.b)
    if isinstance(shape, RadialGraph3D):
        return RadialGraph3D(lam * (1.0 + shape.values) - 1.0)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def rescale_to_unit_volume(shape: Shape) -> tuple[Shape, float]:
    """Dilate so that |E| = omega_n; returns the new shape and the factor."""
    lam = (ball_volume(shape.n) / volume(shape)) ** (1.0 / shape.n)
    return scale(shape, lam), lam


def translate(shape: Shape, v, resolution: int | None = None) -> Shape:
    """Translate by ``v``.

    Polygons are shifted exactly.  A 2D radial graph is not origin-anchored
    after translation, so it becomes a polygon sampled at ``resolution``
    vertices (default 4096).  A 3D radial graph is re-sampled by ray casting
    on its own grid, which requires the translated set to remain star-shaped
    about the origin.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if len(v) != shape.n:
        raise ValueError(f"translation vector must have {shape.n} components")
    if isinstance(shape, Polygon2D):
        return Polygon2D(shape.base, shape.offset + v, validate=False)
    if isinstance(shape, RadialGraph2D):
        resolution = resolution or DEFAULT_N_2D
        need = max(64, 8 * shape.kmax)
        if resolution < need:
            raise ValueError(
                f"polygon resolution {resolution} too coarse for K={shape.kmax}; need >= {need}"
            )
        return polygonize(shape, resolution, offset=v)
    if isinstance(shape, RadialGraph3D):
        return _translate_radial3d(shape, v)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def polygonize(shape: RadialGraph2D, resolution: int, offset=None) -> Polygon2D:
    theta, r, _ = shape.sample(resolution)
    pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    off = np.zeros(2) if offset is None else np.asarray(offset, dtype=float)
    return Polygon2D(pts, off, validate=False)


def _translate_radial3d(shape: RadialGraph3D, v: np.ndarray) -> RadialGraph3D:
    z = sphere_directions(shape.nlat, shape.nlon).reshape(-1, 3)
    rmax = 1.0 + float(np.max(shape.values)) + float(np.linalg.norm(v))

    def inside(s):
        x = s[:, None] * z - v
        rho = np.linalg.norm(x, axis=1)
        return rho < 1.0 + shape.interpolate(x)

    if not np.all(inside(np.full(len(z), 1e-9))):
        raise ValueError("translated 3D set no longer contains the origin; not representable as a radial graph")
    lo = np.zeros(len(z))
    hi = np.full(len(z), rmax * 1.01)
    # star-shapedness check on a coarse ray sampling
    samples = np.linspace(0.0, 1.0, 41)[1:]
    flags = np.stack([inside(hi * s) for s in samples])
    for i in range(len(samples) - 1):
        if np.any(~flags[i] & flags[i + 1]):
            raise ValueError("translated 3D set is not star-shaped about the origin")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ins = inside(mid)
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    return RadialGraph3D((0.5 * (lo + hi)).reshape(shape.nlat, shape.nlon) - 1.0)


def sym_diff_with_ball(shape: Shape, ball: BallSpec, N: int | None = None) -> float:
    """|E Δ B_r(y)| = |E| + |B_r| - 2 |E ∩ B_r(y)|."""
    y, R = ball.center, ball.radius
    if len(y) != shape.n:
        raise ValueError("ball and shape dimensions differ")
    inter = intersection_with_ball(shape, ball, N)
    return volume(shape) + ball_volume(shape.n, R) - 2.0 * inter


def intersection_with_ball(shape: Shape, ball: BallSpec, N: int | None = None) -> float:
    y, R = ball.center, ball.radius
    if isinstance(shape, Polygon2D):
        return polygon_disk_area(shape.vertices, y, R)
    if isinstance(shape, RadialGraph2D):
        N = N or shape.default_n()
        theta, r, _ = shape.sample(N)
        e = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        lo, hi = _ray_ball_interval(e, r, y, R)
        return float(0.5 * np.sum(hi**2 - lo**2) * (2.0 * np.pi / N))
    if isinstance(shape, RadialGraph3D):
        _, _, w = sphere_grid(shape.nlat, shape.nlon)
        z = sphere_directions(shape.nlat, shape.nlon).reshape(-1, 3)
        lo, hi = _ray_ball_interval(z, (1.0 + shape.values).reshape(-1), y, R)
        return float(np.sum(w.reshape(-1) * (hi**3 - lo**3)) / 3.0)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _ray_ball_interval(e: np.ndarray, r: np.ndarray, y: np.ndarray, R: float):
    """Clip the ray segment [0, r] e to the ball B_R(y); returns (lo, hi), hi >= lo."""
    p = e @ y
    disc = p * p - float(y @ y) + R * R
    root = np.sqrt(np.maximum(disc, 0.0))
    lo = np.clip(p - root, 0.0, r)
    hi = np.clip(p + root, 0.0, r)
    hi = np.where(disc > 0.0, np.maximum(hi, lo), lo)
    return lo, hi
