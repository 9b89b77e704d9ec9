"""Isoperimetric functionals: deficit, Riesz potential, oscillation, asymmetries.

All scale-invariant indices are evaluated after dilating the input to unit-ball
volume (``|E| = omega_n``, so the volume radius is 1).  Centers are reported in
the coordinates of the shape that was passed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry as geo
from .geometry import BallSpec, BoundaryQuadrature, Polygon2D, Shape
from .search import SearchResult, multistart_minimize

D_FLOOR = 1e-12
NEGATIVE_BETA_TOL = 1e-8
ROUNDOFF = 1e-13  # relative to P; |P - (n-1) gamma| below this is cancellation noise
SEED_OFFSET = 0.25  # in units of the volume radius
SIMPLEX_STEP = 0.1


def poincare_constant(n: int) -> float:
    """Uniform-concavity constant c_n of t -> (1+t)^((n-1)/n) on [-1, 1]."""
    return (n - 1) / (4.0 * n * n) * 2.0 ** (-(n + 1) / n)


def annulus_bound(a, n: int):
    """n w_n (2 - (1 + a/w_n)^((n-1)/n) - (1 - a/w_n)^((n-1)/n)).

    Lower bound for the gain in the Riesz term when mass ``a`` is moved from
    inside the unit ball to outside it.
    """
    w = geo.ball_volume(n)
    t = np.asarray(a, dtype=float) / w
    p = (n - 1) / n
    return n * w * (2.0 - (1.0 + t) ** p - (1.0 - t) ** p)


def deficit(shape: Shape) -> float:
    """(P(E) - P(B_r)) / r^(n-1) with |B_r| = |E|."""
    n = shape.n
    r = geo.volume_radius(shape)
    return (geo.perimeter(shape) - geo.ball_perimeter(n, r)) / r ** (n - 1)


# --------------------------------------------------------------------------
# boundary integrals
# --------------------------------------------------------------------------


def _radial_dot(q: BoundaryQuadrature, y) -> np.ndarray:
    d = q.points - np.asarray(y, dtype=float)
    dist = np.sqrt(np.einsum("ij,ij->i", d, d))
    dot = np.einsum("ij,ij->i", q.normals, d)
    return np.divide(dot, dist, out=np.zeros_like(dot), where=dist > 0.0)


def riesz_boundary(q: BoundaryQuadrature, y) -> float:
    """(n-1) * integral over E of 1/|x-y|, as a boundary integral.

    Uses the divergence theorem with the bounded field (x-y)/|x-y|, so no
    singular quadrature is needed even for ``y`` inside E.
    """
    y = np.asarray(y, dtype=float)
    dmin = float(np.min(np.linalg.norm(q.points - y, axis=1)))
    if dmin <= 1e-12:
        raise ValueError(f"evaluation point within {dmin:.1e} of a boundary node; perturb y")
    return float(np.dot(q.weights, _radial_dot(q, y)))


def _riesz_sum(q: BoundaryQuadrature, y) -> float:
    return float(np.dot(q.weights, _radial_dot(q, y)))


def oscillation(q: BoundaryQuadrature, y) -> float:
    """Integral over the boundary of 1 - nu . (x-y)/|x-y|."""
    return float(np.dot(q.weights, 1.0 - _radial_dot(q, y)))


def oscillation_normals(q: BoundaryQuadrature, y) -> float:
    """Half the integral of |nu - (x-y)/|x-y||^2 over the boundary."""
    d = q.points - np.asarray(y, dtype=float)
    w = d / np.linalg.norm(d, axis=1)[:, None]
    return 0.5 * float(np.dot(q.weights, np.sum((q.normals - w) ** 2, axis=1)))


def polygon_riesz_exact(poly: Polygon2D, y) -> float:
    """Closed-form integral over a polygon of 1/|x-y| (n = 2).

    Per edge, nu.(x-y) is the constant signed distance h to the edge's line,
    and the integral of h/sqrt(h^2+s^2) along the edge is h*asinh(s/|h|).
    """
    v = poly.vertices - np.asarray(y, dtype=float)
    e = poly.edges
    L = np.hypot(e[:, 0], e[:, 1])
    t = e / L[:, None]
    nrm = np.stack([t[:, 1], -t[:, 0]], axis=1)
    h = np.einsum("ij,ij->i", v, nrm)
    s1 = np.einsum("ij,ij->i", v, t)
    s2 = s1 + L
    ah = np.abs(h)
    safe = ah > 0.0
    term = np.zeros_like(h)
    term[safe] = h[safe] * (np.arcsinh(s2[safe] / ah[safe]) - np.arcsinh(s1[safe] / ah[safe]))
    return float(np.sum(term))


def oscillation_direct(shape: Shape, y, N: Optional[int] = None) -> float:
    """Oscillation at ``y`` by a route independent of :func:`riesz_boundary`.

    Polygons: exact per-edge integrals.  2D radial graphs: the normal-difference
    form on a quadrature of twice the resolution.  3D: the normal-difference
    form on the native grid.
    """
    if isinstance(shape, Polygon2D):
        return geo.perimeter(shape) - polygon_riesz_exact(shape, y)
    if isinstance(shape, geo.RadialGraph2D):
        N = N or shape.default_n()
        return oscillation_normals(geo.boundary_quadrature(shape, 2 * N), y)
    return oscillation_normals(geo.boundary_quadrature(shape), y)


# --------------------------------------------------------------------------
# centers and indices
# --------------------------------------------------------------------------


@dataclass
class CenterResult:
    """Maximizer of y -> integral over E of 1/|x-y|."""

    center: np.ndarray
    gamma: float
    restarts: int
    simplex_size: float
    converged: bool
    gamma_at_barycenter: float
    centers: list[np.ndarray] = field(default_factory=list)

    @property
    def multiple(self) -> bool:
        return len(self.centers) > 1


def _seeds(base: np.ndarray, radius: float) -> list[np.ndarray]:
    n = len(base)
    out = [base.copy()]
    for i in range(n):
        for sgn in (1.0, -1.0):
            s = base.copy()
            s[i] += sgn * SEED_OFFSET * radius
            out.append(s)
    return out


def _center_search(q: BoundaryQuadrature, bary: np.ndarray, radius: float, seeds=None) -> CenterResult:
    n = q.n
    res: SearchResult = multistart_minimize(
        lambda y: -_riesz_sum(q, y) / (n - 1),
        _seeds(bary, radius) if seeds is None else seeds,
        SIMPLEX_STEP * radius,
        xatol=1e-8 * radius,
        fatol=1e-14 * radius ** (n - 1),
    )
    g_bary = _riesz_sum(q, bary) / (n - 1)
    center, g = res.x, -res.value
    if g < g_bary:  # barycenter is always admissible
        center, g = bary.copy(), g_bary
    return CenterResult(
        center=center,
        gamma=g,
        restarts=res.restarts,
        simplex_size=res.simplex_size,
        converged=res.converged,
        gamma_at_barycenter=g_bary,
        centers=[x for x, _ in res.optima] or [center],
    )


def _perimeter(shape: Shape, N: Optional[int]) -> float:
    if isinstance(shape, geo.RadialGraph3D):
        return geo.perimeter(shape)
    return geo.perimeter(shape, N)


class _Gauge:
    """Shape dilated to unit volume plus lazily computed shared pieces."""

    def __init__(self, shape: Shape, N: Optional[int] = None):
        self.shape = shape
        self.n = shape.n
        self.unit, self.lam = geo.rescale_to_unit_volume(shape)
        self.N = N
        self.q = geo.boundary_quadrature(self.unit, N)
        self.P = _perimeter(self.unit, N)
        self.bary = geo.barycenter(self.unit)
        self._center: Optional[CenterResult] = None

    @property
    def center(self) -> CenterResult:
        if self._center is None:
            self._center = _center_search(self.q, self.bary, 1.0)
        return self._center

    def sd(self, y) -> float:
        return geo.sym_diff_with_ball(self.unit, BallSpec(y, 1.0), self.N)

    def to_input(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) / self.lam


def gamma(shape: Shape, N: Optional[int] = None) -> CenterResult:
    """Maximize the Riesz potential over centers, in the shape's own scale."""
    q = geo.boundary_quadrature(shape, N)
    return _center_search(q, geo.barycenter(shape), geo.volume_radius(shape))


def beta_squared(shape: Shape, N: Optional[int] = None, warm_start=None) -> tuple[float, np.ndarray]:
    """Scale-invariant beta^2 = (P - (n-1) gamma) / r^(n-1) and the center used.

    With ``warm_start`` the center search runs from that single seed instead of
    the full multistart.
    """
    n = shape.n
    q = geo.boundary_quadrature(shape, N)
    r = geo.volume_radius(shape)
    bary = geo.barycenter(shape)
    seeds = None if warm_start is None else [np.asarray(warm_start, dtype=float)]
    c = _center_search(q, bary, r, seeds)
    P = _perimeter(shape, N)
    b2 = P - (n - 1) * c.gamma
    if abs(b2) < ROUNDOFF * P:
        b2 = 0.0
    return b2 / r ** (n - 1), c.center


@dataclass
class BetaResult:
    beta: float
    beta_direct: float
    center: np.ndarray
    residual: float
    quadrature_failure: bool


def _beta2(g: _Gauge, y=None) -> float:
    """P - (n-1) * Riesz potential at ``y`` (the Riesz center by default)."""
    if y is None:
        b2 = g.P - (g.n - 1) * g.center.gamma
    else:
        b2 = g.P - _riesz_sum(g.q, y)
    return 0.0 if abs(b2) < ROUNDOFF * g.P else b2


def _beta(g: _Gauge) -> BetaResult:
    c = g.center
    b2 = _beta2(g)
    failure = b2 < -NEGATIVE_BETA_TOL
    b2d = oscillation_direct(g.unit, c.center, g.N)
    return BetaResult(
        beta=math.sqrt(max(0.0, b2)),
        beta_direct=math.sqrt(max(0.0, b2d)),
        center=g.to_input(c.center),
        residual=abs(b2 - b2d),
        quadrature_failure=failure,
    )


def beta(shape: Shape, N: Optional[int] = None) -> BetaResult:
    """Oscillation index via beta^2 = P - (n-1) gamma, with a direct cross-check."""
    return _beta(_Gauge(shape, N))


@dataclass
class FraenkelResult:
    alpha: float
    center: np.ndarray
    converged: bool


def _fraenkel(g: _Gauge) -> tuple[FraenkelResult, np.ndarray]:
    seeds = [g.bary, g.center.center]
    res = multistart_minimize(g.sd, seeds, SIMPLEX_STEP, xatol=1e-8, fatol=1e-15)
    return FraenkelResult(res.value, g.to_input(res.x), res.converged), res.x


def fraenkel(shape: Shape, N: Optional[int] = None) -> FraenkelResult:
    """Fraenkel asymmetry min_y |E Δ B_r(y)| / r^n."""
    return _fraenkel(_Gauge(shape, N))[0]


@dataclass
class AsymmetryResult:
    A: float
    center: np.ndarray
    upper_bound: float
    converged: bool


def _asymmetry(g: _Gauge, y_alpha: np.ndarray) -> AsymmetryResult:
    def S(y):
        return g.sd(y) + math.sqrt(2.0 * max(0.0, _beta2(g, y)))

    y_star = g.center.center
    res = multistart_minimize(S, [y_alpha, y_star, g.bary], SIMPLEX_STEP, xatol=1e-8, fatol=1e-15)
    return AsymmetryResult(res.value, g.to_input(res.x), min(S(y_alpha), S(y_star)), res.converged)


def asymmetry_A(shape: Shape, N: Optional[int] = None) -> AsymmetryResult:
    """Combined index: Fraenkel term plus the unhalved normal oscillation, one center."""
    g = _Gauge(shape, N)
    _, ya = _fraenkel(g)
    return _asymmetry(g, ya)


@dataclass
class PoincareCheck:
    lhs: float
    rhs: float
    slack: float
    a: float
    c_n: float
    converged: bool = True


def _strong_poincare(g: _Gauge, D: float, b2: float) -> PoincareCheck:
    n = g.n
    y = g.center.center
    a = 0.5 * g.sd(y)
    cn = poincare_constant(n)
    rhs = D + 8.0 * n * cn / geo.ball_volume(n) * a * a
    return PoincareCheck(b2, rhs, b2 - rhs, a, cn, g.center.converged)


def strong_poincare_check(shape: Shape, N: Optional[int] = None) -> PoincareCheck:
    """Check beta^2 >= D + (8 n c_n / w_n) a^2 with the ball at the Riesz center.

    Dilates to unit volume and places the unit ball at the maximizing center,
    which is equivalent to translating the set so that the center is the origin.
    """
    g = _Gauge(shape, N)
    return _strong_poincare(g, deficit(g.unit), _beta2(g))


def center_stability_check(shape: Shape, delta: float, N: Optional[int] = None) -> float:
    """|y*| for a unit-volume set with |E Δ B_1| < delta."""
    w = geo.ball_volume(shape.n)
    if abs(geo.volume(shape) - w) > 1e-8 * w:
        raise ValueError("center_stability_check expects |E| = omega_n")
    sd = geo.sym_diff_with_ball(shape, BallSpec(np.zeros(shape.n), 1.0), N)
    if not sd < delta:
        raise ValueError(f"|E Δ B_1| = {sd:.3g} is not below delta = {delta:.3g}")
    return float(np.linalg.norm(gamma(shape, N).center))


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

REPORT_FIELDS = (
    "P", "V", "D", "gamma", "y_star", "beta", "beta_direct", "alpha", "y_alpha",
    "A", "y_A", "res_identity", "ratio_A2_D", "ratio_b2_D", "ratio_prop", "sp_lhs", "sp_rhs",
)


@dataclass
class FunctionalReport:
    """One shape's full panel.

    ``P``, ``V`` and ``gamma`` are in the input scale; every other value is
    scale-invariant or taken in the unit-volume gauge.  Ratios are ``None`` when
    the deficit is below ``D_FLOOR``.
    """

    P: float
    V: float
    r: float
    D: float
    gamma: float
    y_star: np.ndarray
    beta: float
    beta_direct: float
    alpha: float
    y_alpha: np.ndarray
    A: float
    y_A: np.ndarray
    A_upper: float
    res_identity: float
    ratio_A2_D: Optional[float]
    ratio_b2_D: Optional[float]
    ratio_prop: Optional[float]
    sp_lhs: float
    sp_rhs: float
    sp_slack: float
    quadrature_failure: bool = False
    optimizer_converged: bool = True
    multiple_centers: bool = False
    violations: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {}
        for name in REPORT_FIELDS:
            val = getattr(self, name)
            out[name] = [float(c) for c in val] if isinstance(val, np.ndarray) else val
        return out

    def full_dict(self) -> dict:
        out = self.to_dict()
        out.update(
            r=self.r,
            A_upper=self.A_upper,
            sp_slack=self.sp_slack,
            quadrature_failure=self.quadrature_failure,
            optimizer_converged=self.optimizer_converged,
            multiple_centers=self.multiple_centers,
            violations=list(self.violations),
        )
        return out


def inequality_panel(
    shape: Shape,
    N: Optional[int] = None,
    sp_tol: float = 1e-6,
    order_tol: float = 1e-8,
    identity_tol: float = 1e-6,
) -> FunctionalReport:
    """Evaluate every index on ``shape`` and the parameter-free inequalities.

    Violations (ordering beta <= A/sqrt(2), strong-Poincare slack, identity
    residual relative to P) are listed in ``violations`` rather than raised.
    """
    g = _Gauge(shape, N)
    n = g.n
    P = _perimeter(shape, N)
    V = geo.volume(shape)
    r = (V / geo.ball_volume(n)) ** (1.0 / n)
    D = deficit(g.unit)
    center = g.center
    b = _beta(g)
    fr, ya = _fraenkel(g)
    asym = _asymmetry(g, ya)
    sp = _strong_poincare(g, D, _beta2(g))

    if D < D_FLOOR:
        ratios = (None, None, None)
    else:
        ratios = (
            asym.A**2 / D,
            b.beta**2 / D,
            (asym.A + math.sqrt(D)) / b.beta if b.beta > 0 else None,
        )

    violations = []
    if b.beta > asym.A / math.sqrt(2.0) + order_tol:
        violations.append(f"ordering: beta={b.beta:.10g} > A/sqrt2={asym.A / math.sqrt(2):.10g}")
    if sp.slack < -sp_tol:
        violations.append(f"strong-poincare: slack={sp.slack:.3g}")
    if b.residual > identity_tol * g.P:
        violations.append(f"identity: residual={b.residual:.3g}")
    if b.quadrature_failure:
        violations.append("identity: negative beta^2 beyond tolerance")

    return FunctionalReport(
        P=P,
        V=V,
        r=r,
        D=D,
        gamma=center.gamma * r ** (n - 1),
        y_star=b.center,
        beta=b.beta,
        beta_direct=b.beta_direct,
        alpha=fr.alpha,
        y_alpha=fr.center,
        A=asym.A,
        y_A=asym.center,
        A_upper=asym.upper_bound,
        res_identity=b.residual,
        ratio_A2_D=ratios[0],
        ratio_b2_D=ratios[1],
        ratio_prop=ratios[2],
        sp_lhs=sp.lhs,
        sp_rhs=sp.rhs,
        sp_slack=sp.slack,
        quadrature_failure=b.quadrature_failure,
        optimizer_converged=center.converged and fr.converged and asym.converged,
        multiple_centers=center.multiple,
        violations=violations,
    )
