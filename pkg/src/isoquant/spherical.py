"""Nearly spherical sets: normalization, Sobolev norms and the Fuglede ratio.

A nearly spherical set is a radial graph ``(1 + u(z)) z`` over the unit sphere
with ``|E| = omega_n`` and barycenter at the origin.  In 2D ``u`` is a
trigonometric polynomial (:class:`~isoquant.geometry.RadialGraph2D`), in 3D a
lat-long grid (:class:`~isoquant.geometry.RadialGraph3D`).
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import functionals as fn
from . import geometry as geo
from .geometry import RadialGraph2D, RadialGraph3D

logger = logging.getLogger(__name__)

SphericalFunction = Union[RadialGraph2D, RadialGraph3D]

EPS0 = 0.1
VOLUME_TOL = 1e-10
BARYCENTER_TOL = {2: 1e-10, 3: 1e-8}


# --------------------------------------------------------------------------
# pointwise evaluation
# --------------------------------------------------------------------------


def _angles(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.arctan2(z[..., 1], z[..., 0])


def u_value(u: SphericalFunction, z) -> np.ndarray:
    """u at unit vector(s) ``z``."""
    if isinstance(u, RadialGraph2D):
        return u.u(_angles(z))
    return u.interpolate(np.asarray(z, dtype=float))


def tangential_gradient(u: SphericalFunction, z) -> np.ndarray:
    """Tangential gradient of u at unit vector(s) ``z``."""
    z = np.asarray(z, dtype=float)
    if isinstance(u, RadialGraph2D):
        th = _angles(z)
        du = u.du(th)
        return du[..., None] * np.stack([-np.sin(th), np.cos(th)], axis=-1)
    grid = u.tangential_gradient()
    g = np.stack([geo.grid_interpolate(grid[..., k], z) for k in range(3)], axis=-1)
    zn = z / np.linalg.norm(z, axis=-1, keepdims=True)
    return g - np.sum(g * zn, axis=-1, keepdims=True) * zn


def normal_vector(u: SphericalFunction, z) -> np.ndarray:
    """Outward unit normal of the radial graph at the boundary point over ``z``.

    (z (1+u) - grad u) / sqrt((1+u)^2 + |grad u|^2).
    """
    z = np.asarray(z, dtype=float)
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    r = 1.0 + u_value(u, z)
    g = tangential_gradient(u, z)
    v = r[..., None] * z - g
    return v / np.sqrt(r**2 + np.sum(g * g, axis=-1))[..., None]


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------


@dataclass
class SobolevNorms:
    L2: float
    H1semi: float
    W1inf: float

    @property
    def W12_squared(self) -> float:
        return self.L2**2 + self.H1semi**2


def sobolev_norms(u: SphericalFunction, samples: int = 8192) -> SobolevNorms:
    """L2 norm, H1 seminorm and W^{1,inf} norm (sup|u| + sup|grad u|) on the sphere."""
    if isinstance(u, RadialGraph2D):
        k = np.arange(1, u.kmax + 1)
        ab2 = u.a**2 + u.b**2
        l2 = 2.0 * math.pi * u.a0**2 + math.pi * float(np.sum(ab2))
        h1 = math.pi * float(np.sum(k**2 * ab2))
        N = max(samples, 16 * u.kmax + 16)
        _, r, dr = u.sample(N)
        winf = float(np.max(np.abs(r - 1.0)) + np.max(np.abs(dr)))
        return SobolevNorms(math.sqrt(l2), math.sqrt(h1), winf)
    _, _, w = geo.sphere_grid(u.nlat, u.nlon)
    g = u.tangential_gradient()
    g2 = np.sum(g * g, axis=-1)
    l2 = float(np.sum(w * u.values**2))
    h1 = float(np.sum(w * g2))
    winf = float(np.max(np.abs(u.values)) + np.sqrt(np.max(g2)))
    return SobolevNorms(math.sqrt(l2), math.sqrt(h1), winf)


def sobolev_norms_sampled(u: RadialGraph2D, N: int = 4096) -> SobolevNorms:
    """Same norms by direct trapezoid sampling (cross-check for the Parseval path)."""
    _, r, dr = u.sample(N)
    h = 2.0 * math.pi / N
    uu = r - 1.0
    return SobolevNorms(
        math.sqrt(float(np.sum(uu**2)) * h),
        math.sqrt(float(np.sum(dr**2)) * h),
        float(np.max(np.abs(uu)) + np.max(np.abs(dr))),
    )


# --------------------------------------------------------------------------
# normalization
# --------------------------------------------------------------------------


@dataclass
class NormalizedSphericalSet:
    u: SphericalFunction
    volume: float
    barycenter: np.ndarray
    newton_iterations: int
    recenter_iterations: int
    w1inf: float

    @property
    def small(self) -> bool:
        return self.w1inf <= EPS0


def _shift(u: SphericalFunction, c: float) -> SphericalFunction:
    if isinstance(u, RadialGraph2D):
        return RadialGraph2D(u.a0 + c, u.a, u.b)
    return RadialGraph3D(u.values + c)


def _fix_volume(u: SphericalFunction, maxiter: int = 50) -> tuple[SphericalFunction, int]:
    n = u.n
    target = geo.ball_volume(n)
    for it in range(maxiter):
        v = geo.volume(u)
        if abs(v - target) <= VOLUME_TOL * 0.1:
            return u, it
        # dV/dc = integral of (1+u)^(n-1) over the sphere
        if isinstance(u, RadialGraph2D):
            _, r, _ = u.sample(max(256, 4 * u.kmax + 4))
            dv = float(np.sum(r)) * 2.0 * math.pi / len(r)
        else:
            _, _, w = geo.sphere_grid(u.nlat, u.nlon)
            dv = float(np.sum(w * (1.0 + u.values) ** 2))
        step = (v - target) / dv
        if not math.isfinite(step) or abs(step) > 1.0:
            break
        try:
            u = _shift(u, -step)
        except ValueError:
            break
    v = geo.volume(u)
    if abs(v - target) > VOLUME_TOL:
        raise ValueError(
            f"volume Newton iteration diverged (|E| = {v:.6g}); ||u||_W1inf = {sobolev_norms(u).W1inf:.3g}"
        )
    return u, maxiter


def resample_translated(u: RadialGraph2D, v, kmax: Optional[int] = None) -> RadialGraph2D:
    """Radial graph of the translated set E + v, re-expanded in Fourier modes.

    For each output angle phi the boundary parameter theta with
    arg(r(theta) e_theta + v) = phi is found by Newton's method.
    """
    v = np.asarray(v, dtype=float)
    K = kmax or min(256, max(2 * u.kmax, 32))
    M = 4 * K + 8
    phi = 2.0 * math.pi * np.arange(M) / M
    e = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    th = phi.copy()
    for _ in range(50):
        r = 1.0 + u.u(th)
        dr = u.du(th)
        c, s = np.cos(th), np.sin(th)
        X = np.stack([r * c, r * s], axis=1) + v
        dX = np.stack([dr * c - r * s, dr * s + r * c], axis=1)
        f = e[:, 0] * X[:, 1] - e[:, 1] * X[:, 0]
        df = e[:, 0] * dX[:, 1] - e[:, 1] * dX[:, 0]
        step = f / df
        th = th - step
        if np.max(np.abs(step)) < 1e-15:
            break
    r = 1.0 + u.u(th)
    X = np.stack([r * np.cos(th), r * np.sin(th)], axis=1) + v
    s = np.einsum("ij,ij->i", X, e)
    if np.min(s) <= 0.0:
        raise ValueError("translated set does not contain the origin")
    coef = np.fft.rfft(s - 1.0) / M
    a0 = float(coef[0].real)
    a = 2.0 * coef[1 : K + 1].real
    b = -2.0 * coef[1 : K + 1].imag
    tail = float(np.max(np.abs(coef[K // 2 : K + 1]))) if K >= 2 else 0.0
    if tail > 1e-12:
        logger.debug("resampled Fourier tail %.2e (K=%d)", tail, K)
    return RadialGraph2D(a0, a, b)


def normalize(u: SphericalFunction, maxiter: int = 20) -> NormalizedSphericalSet:
    """Enforce |E| = omega_n (Newton on the constant mode) and barycenter 0
    (translate and re-sample)."""
    if not isinstance(u, (RadialGraph2D, RadialGraph3D)):
        raise TypeError("normalize expects a radial graph")
    n = u.n
    w1 = sobolev_norms(u).W1inf
    try:
        u, newton = _fix_volume(u)
    except ValueError as exc:
        raise ValueError(f"{exc} (input ||u||_W1inf = {w1:.3g})") from None
    it = 0
    tol = BARYCENTER_TOL[n]
    for it in range(1, maxiter + 1):
        c = geo.barycenter(u)
        if np.linalg.norm(c) <= tol:
            it -= 1
            break
        if isinstance(u, RadialGraph2D):
            u = resample_translated(u, -c)
        else:
            u = geo.translate(u, -c)
        u, k = _fix_volume(u)
        newton += k
    c = geo.barycenter(u)
    if np.linalg.norm(c) > tol:
        logger.warning("barycenter %.2e after %d recentering passes", np.linalg.norm(c), it)
    return NormalizedSphericalSet(u, geo.volume(u), c, newton, it, sobolev_norms(u).W1inf)


def fourier_mode(k: int, t: float, phase: str = "cos") -> RadialGraph2D:
    a = np.zeros(k)
    b = np.zeros(k)
    (a if phase == "cos" else b)[k - 1] = t
    return RadialGraph2D(0.0, a, b)


def mode_ratio_limit(k: int) -> float:
    """Small-amplitude limit of D / ||u||^2_{W^{1,2}} for u = t cos(k theta)."""
    return (k * k - 1) / (2.0 * (1 + k * k))


# --------------------------------------------------------------------------
# Fuglede estimate
# --------------------------------------------------------------------------


@dataclass
class FugledeRatio:
    D: float
    norm2: float
    ratio: Optional[float]
    small: bool


def fuglede_ratio(u: Union[SphericalFunction, NormalizedSphericalSet], eps0: float = EPS0) -> FugledeRatio:
    """D(E) / ||u||^2_{W^{1,2}} for a normalized set (normalized here if needed)."""
    s = u if isinstance(u, NormalizedSphericalSet) else normalize(u)
    D = fn.deficit(s.u)
    norm2 = sobolev_norms(s.u).W12_squared
    small = s.w1inf <= eps0
    if not small:
        logger.info("smallness regime violated: ||u||_W1inf = %.3g > %.3g", s.w1inf, eps0)
    ratio = D / norm2 if norm2 > 0.0 and D > fn.D_FLOOR else None
    return FugledeRatio(D, norm2, ratio, small)


def random_spherical(seed: int, index: int, modes: Sequence[int] = range(2, 9), scale: float = 0.02) -> RadialGraph2D:
    """Gaussian Fourier coefficients with variance scale^2 k^-4 on ``modes``.

    The stream for sample ``index`` depends only on ``(seed, index)``.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    kmax = max(modes)
    a = np.zeros(kmax)
    b = np.zeros(kmax)
    for k in modes:
        sd = scale / k**2
        a[k - 1], b[k - 1] = rng.normal(0.0, sd, size=2)
    return RadialGraph2D(0.0, a, b)


@dataclass
class FugledeSurvey:
    ratios: np.ndarray
    infimum: float
    argmin: int
    infimum_refined: float
    small_fraction: float


def fuglede_survey(
    samples: int = 200,
    modes: Sequence[int] = range(2, 9),
    seed: int = 0,
    scale: float = 0.02,
    N: Optional[int] = None,
) -> FugledeSurvey:
    """Fuglede ratio over a random family and its infimum at N and 2N."""
    ratios = []
    ratios2 = []
    small = 0
    for i in range(samples):
        s = normalize(random_spherical(seed, i, modes, scale))
        D1 = _deficit_at(s.u, N)
        D2 = _deficit_at(s.u, 2 * (N or s.u.default_n()))
        norm2 = sobolev_norms(s.u).W12_squared
        ratios.append(D1 / norm2)
        ratios2.append(D2 / norm2)
        small += s.small
    r = np.array(ratios)
    i = int(np.argmin(r))
    return FugledeSurvey(r, float(r[i]), i, float(np.min(ratios2)), small / samples)


def _deficit_at(u: RadialGraph2D, N: Optional[int]) -> float:
    r = geo.volume_radius(u)
    return (geo.perimeter(u, N) - geo.ball_perimeter(2, r)) / r


@dataclass
class SharpnessTable:
    t: np.ndarray
    alpha: np.ndarray
    D: np.ndarray
    slope: float

    def alpha_over_t(self) -> np.ndarray:
        return self.alpha / self.t


def sharpness_family(t_values: Iterable[float], k: int = 2) -> SharpnessTable:
    """alpha and D along normalized u_t = t cos(k theta); log-log slope of D vs alpha."""
    ts, al, ds = [], [], []
    for t in t_values:
        if not 0.0 < t < EPS0:
            raise ValueError(f"t = {t} outside (0, {EPS0})")
        s = normalize(fourier_mode(k, t))
        ts.append(t)
        al.append(fn.fraenkel(s.u).alpha)
        ds.append(fn.deficit(s.u))
    ts, al, ds = map(np.array, (ts, al, ds))
    slope = float(np.polyfit(np.log(al), np.log(ds), 1)[0]) if len(ts) > 1 else math.nan
    return SharpnessTable(ts, al, ds, slope)


@dataclass
class ChainCheck:
    beta2: float
    A2: float
    D: float
    alpha: float
    gamma_origin: float
    ordered: bool

    @property
    def ratio(self) -> Optional[float]:
        return self.A2 / self.D if self.D > fn.D_FLOOR else None


def fuglede_chain_check(u: Union[SphericalFunction, NormalizedSphericalSet]) -> ChainCheck:
    """beta^2 <= A^2 and the A^2/D ratio for a nearly spherical set.

    ``gamma_origin`` is the Riesz potential at the origin; for a planar radial
    graph it equals the integral of r(theta) over the circle.
    """
    s = u if isinstance(u, NormalizedSphericalSet) else normalize(u)
    rep = fn.inequality_panel(s.u)
    if isinstance(s.u, RadialGraph2D):
        N = s.u.default_n()
        _, r, _ = s.u.sample(N)
        g0 = float(np.sum(r)) * 2.0 * math.pi / N
    else:
        g0 = fn.riesz_boundary(geo.boundary_quadrature(s.u), np.zeros(3)) / 2.0
    b2 = rep.beta**2
    return ChainCheck(b2, rep.A**2, rep.D, rep.alpha, g0, b2 <= rep.A**2)


RATIO_COLUMNS = ("t", "alpha", "D", "beta2", "A2", "ratio")


def ratio_table(t_values: Iterable[float], k: int = 2) -> list[dict]:
    """Rows of (t, alpha, D, beta^2, A^2, A^2/D) along normalized t cos(k theta)."""
    rows = []
    for t in t_values:
        c = fuglede_chain_check(normalize(fourier_mode(k, t)))
        rows.append(dict(t=float(t), alpha=c.alpha, D=c.D, beta2=c.beta2, A2=c.A2, ratio=c.ratio))
    return rows


def ratio_table_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RATIO_COLUMNS)
    for r in rows:
        w.writerow(["" if r[c] is None else repr(float(r[c])) for c in RATIO_COLUMNS])
    return buf.getvalue()
