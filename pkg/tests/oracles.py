"""Reference computations that share no code with the package."""

import math

import numpy as np
from scipy import integrate

SQ_HALF = math.sqrt(math.pi) / 2.0
HEX_APOTHEM = math.sqrt(math.pi / (6.0 * math.tan(math.pi / 6.0)))


def segment_area(d: float, r: float = 1.0) -> float:
    """Area of the part of the radius-r disk beyond a chord at distance d."""
    return r * r * math.acos(d / r) - d * math.sqrt(r * r - d * d)


def ngon_perimeter(N: int, area: float = math.pi) -> float:
    return 2.0 * math.sqrt(area * N * math.tan(math.pi / N))


def ngon_gamma(N: int, area: float = math.pi) -> float:
    """Integral of 1/|x| over the centered regular N-gon: 2 N h ln(sec + tan)."""
    h = math.sqrt(area / (N * math.tan(math.pi / N)))
    t = math.pi / N
    return 2.0 * N * h * math.log(1.0 / math.cos(t) + math.tan(t))


SQUARE_P = 4.0 * math.sqrt(math.pi)
SQUARE_GAMMA = 8.0 * SQ_HALF * math.log(1.0 + math.sqrt(2.0))
SQUARE_ALPHA = 8.0 * segment_area(SQ_HALF)
HEX_P = ngon_perimeter(6)
HEX_GAMMA = ngon_gamma(6)
HEX_ALPHA = 12.0 * segment_area(HEX_APOTHEM)


def _ray_lengths(verts: np.ndarray, y: np.ndarray, phi: float) -> float:
    """Length of {rho > 0 : y + rho e(phi) in polygon} by even-odd crossings."""
    e = np.array([math.cos(phi), math.sin(phi)])
    a = verts - y
    b = np.roll(verts, -1, axis=0) - y
    d = b - a
    den = e[0] * (-d[:, 1]) - e[1] * (-d[:, 0])
    hits = []
    for i in range(len(a)):
        if abs(den[i]) < 1e-300:
            continue
        rho = (a[i, 0] * (-d[i, 1]) - a[i, 1] * (-d[i, 0])) / den[i]
        s = (e[0] * a[i, 1] - e[1] * a[i, 0]) / den[i]
        if rho > 0 and 0 <= s < 1:
            hits.append(rho)
    hits.sort()
    inside = len(hits) % 2 == 1
    total, start = 0.0, 0.0
    for h in hits:
        if inside:
            total += h - start
        start = h
        inside = not inside
    return total


def polar_riesz(verts, y) -> float:
    """Integral of 1/|x-y| over a polygon, as the angular integral of ray
    lengths about y, split at vertex directions and integrated adaptively."""
    verts = np.asarray(verts, dtype=float)
    y = np.asarray(y, dtype=float)
    angs = np.sort(np.mod(np.arctan2(verts[:, 1] - y[1], verts[:, 0] - y[0]), 2 * math.pi))
    cuts = np.concatenate([[0.0], angs, [2 * math.pi]])
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 1e-14:
            continue
        val, _ = integrate.quad(lambda p: _ray_lengths(verts, y, p), lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
        total += val
    return total


def polar_riesz_radial(radius, y, pieces: int = 64) -> float:
    """Same for a star-shaped set r(theta) about the origin with y inside."""
    y = np.asarray(y, dtype=float)

    def length(phi):
        e = np.array([math.cos(phi), math.sin(phi)])
        # boundary point y + rho e must satisfy |x| = radius(arg x); bisect
        lo, hi = 0.0, 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            x = y + mid * e
            if np.hypot(*x) < radius(math.atan2(x[1], x[0])):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    edges = np.linspace(0.0, 2 * math.pi, pieces + 1)
    return sum(integrate.quad(length, a, b, epsabs=1e-11, epsrel=1e-11)[0] for a, b in zip(edges[:-1], edges[1:]))


def inside_polygon(verts: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd point-in-polygon test."""
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        cond = (y0 > y) != (y1 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (x < xc)
    return inside


def grid_sym_diff(verts, center, r, M: int = 2000) -> float:
    """|E delta B_r(center)| by midpoint-grid area counting."""
    verts = np.asarray(verts, dtype=float)
    lo = np.minimum(verts.min(axis=0), np.asarray(center) - r) - 1e-9
    hi = np.maximum(verts.max(axis=0), np.asarray(center) + r) + 1e-9
    xs = lo[0] + (np.arange(M) + 0.5) * (hi[0] - lo[0]) / M
    ys = lo[1] + (np.arange(M) + 0.5) * (hi[1] - lo[1]) / M
    cell = (hi[0] - lo[0]) * (hi[1] - lo[1]) / M**2
    total = 0
    for row in np.array_split(np.arange(M), 20):
        X, Y = np.meshgrid(xs, ys[row])
        pts = np.column_stack([X.ravel(), Y.ravel()])
        inE = inside_polygon(verts, pts)
        inB = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1]) < r
        total += np.count_nonzero(inE ^ inB)
    return total * cell


def radial_perimeter(radius, dradius) -> float:
    val, _ = integrate.quad(lambda t: math.hypot(radius(t), dradius(t)), 0, 2 * math.pi, limit=400, epsabs=1e-13)
    return val


def radial_moment(radius) -> tuple[float, float]:
    """(1/3) int r^3 (cos, sin) d theta: first moments of a star-shaped set."""
    cx = integrate.quad(lambda t: radius(t) ** 3 * math.cos(t) / 3, 0, 2 * math.pi, epsabs=1e-13, limit=200)[0]
    cy = integrate.quad(lambda t: radius(t) ** 3 * math.sin(t) / 3, 0, 2 * math.pi, epsabs=1e-13, limit=200)[0]
    return cx, cy
