"""Descent on the penalized perimeter functional over planar radial graphs.

The energy is ``P(E) + lam * ||E| - omega_n| + (1/4) |beta(E)^2 - eps|``; with
``eps=None`` the oscillation term is dropped and the unit ball (up to
translation) is the unique minimizer when ``lam > n``.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import functionals as fn
from . import geometry as geo
from .geometry import Polygon2D, RadialGraph2D, RadialGraph3D, Shape

logger = logging.getLogger(__name__)

KINK_TOL = 1e-12


@dataclass(frozen=True)
class FlowConfig:
    lam: float = 3.0
    eps: Optional[float] = None
    R0: float = 2.0
    step: float = 0.01
    max_iter: int = 500
    tol: float = 1e-10
    gtol: float = 1e-6
    K: int = 8
    n: int = 2
    N: int = 1024
    fd_step: float = 1e-5
    max_backtracks: int = 40

    def __post_init__(self) -> None:
        if self.n != 2:
            raise ValueError("shape flow is implemented for planar radial graphs only")
        if not self.lam > self.n:
            raise ValueError(f"penalty weight must exceed n = {self.n}, got {self.lam}")
        if not self.R0 > 1.0:
            raise ValueError("confinement radius R0 must exceed 1")
        if self.eps is not None and self.eps < 0:
            raise ValueError("eps must be nonnegative")


@dataclass
class EnergyTerms:
    total: float
    P: float
    vol_pen: float
    osc_pen: float
    V: float
    beta2: Optional[float] = None
    center: Optional[np.ndarray] = None


def _check_confined(shape: Shape, R0: float) -> None:
    if isinstance(shape, Polygon2D):
        rmax = float(np.max(np.linalg.norm(shape.vertices, axis=1)))
    elif isinstance(shape, RadialGraph2D):
        _, r, _ = shape.sample(max(1024, 8 * shape.kmax + 8))
        rmax = float(np.max(r))
    elif isinstance(shape, RadialGraph3D):
        rmax = float(np.max(1.0 + shape.values))
    else:
        raise TypeError(type(shape).__name__)
    if not rmax < R0:
        raise ValueError(f"shape leaves the confinement ball B_R0 (max radius {rmax:.4g} >= {R0})")


def penalized_energy(shape: Shape, config: FlowConfig, warm_start=None) -> EnergyTerms:
    """P + lam ||E| - omega_n| + (1/4) |beta^2 - eps| with a fresh center solve."""
    _check_confined(shape, config.R0)
    n = shape.n
    N = config.N if not isinstance(shape, RadialGraph3D) else None
    P = geo.perimeter(shape, N) if N else geo.perimeter(shape)
    V = geo.volume(shape)
    vol = config.lam * abs(V - geo.ball_volume(n))
    osc = 0.0
    b2 = center = None
    if config.eps is not None:
        b2, center = fn.beta_squared(shape, N, warm_start)
        osc = 0.25 * abs(b2 - config.eps)
    return EnergyTerms(P + vol + osc, P, vol, osc, V, b2, center)


# --------------------------------------------------------------------------
# coefficient-space descent
# --------------------------------------------------------------------------


def pack(u: RadialGraph2D, K: int) -> np.ndarray:
    a = np.zeros(K)
    b = np.zeros(K)
    k = min(K, u.kmax)
    if np.any(u.a[K:]) or np.any(u.b[K:]):
        raise ValueError(f"initial shape has modes above the cutoff K={K}")
    a[:k], b[:k] = u.a[:k], u.b[:k]
    return np.concatenate([[u.a0], a, b])


def unpack(x: np.ndarray) -> RadialGraph2D:
    K = (len(x) - 1) // 2
    return RadialGraph2D(x[0], x[1 : K + 1], x[K + 1 :])


@dataclass
class FlowState:
    iteration: int
    coeffs: np.ndarray
    energy: float
    P: float
    vol_pen: float
    osc_pen: float
    V: float
    step_norm: float
    step_size: float
    converged: bool = False
    beta2: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "iteration": self.iteration,
                "energy": self.energy,
                "P": self.P,
                "volPen": self.vol_pen,
                "oscPen": self.osc_pen,
                "stepNorm": self.step_norm,
                "stepSize": self.step_size,
                "V": self.V,
                "beta2": self.beta2,
                "converged": self.converged,
                "a0": float(self.coeffs[0]),
                "a": [float(c) for c in self.coeffs[1 : (len(self.coeffs) - 1) // 2 + 1]],
                "b": [float(c) for c in self.coeffs[(len(self.coeffs) - 1) // 2 + 1 :]],
            }
        )

    @property
    def shape(self) -> RadialGraph2D:
        return unpack(self.coeffs)


@dataclass
class FlowResult:
    trajectory: list[FlowState]
    converged: bool
    line_search_failed: bool = False
    projections: int = 0
    # energy of the final iterate re-evaluated with a full center multistart
    confirmed: Optional[EnergyTerms] = None

    @property
    def final(self) -> FlowState:
        return self.trajectory[-1]


class _Problem:
    """Energy pieces as functions of the coefficient vector, with a warm-started center."""

    def __init__(self, config: FlowConfig):
        self.config = config
        self.center = None
        self.omega = geo.ball_volume(config.n)

    def feasible(self, x: np.ndarray) -> bool:
        try:
            u = unpack(x)
        except ValueError:
            return False
        _, r, _ = u.sample(max(1024, 8 * u.kmax + 8))
        return bool(np.max(r) < self.config.R0 and np.min(r) > 0.0)

    def pieces(self, x: np.ndarray):
        u = unpack(x)
        P = geo.perimeter(u, self.config.N)
        V = geo.volume(u)
        b2 = c = None
        if self.config.eps is not None:
            b2, c = fn.beta_squared(u, self.config.N, self.center)
        return P, V, b2, c

    def terms(self, x: np.ndarray) -> EnergyTerms:
        P, V, b2, c = self.pieces(x)
        vol = self.config.lam * abs(V - self.omega)
        osc = 0.0 if b2 is None else 0.25 * abs(b2 - self.config.eps)
        return EnergyTerms(P + vol + osc, P, vol, osc, V, b2, c)

    def gradient(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        """Descent direction and stationarity measure.

        The direction uses central differences of the smooth pieces chained
        through |.| with sign(0) = 0.  Stationarity is the norm of the
        minimum-norm element of the subdifferential, which vanishes at a kink
        minimizer such as the unit ball.
        """
        cfg = self.config
        P0, V0, b0, _ = self.pieces(x)
        h = cfg.fd_step
        gP = np.zeros_like(x)
        gV = np.zeros_like(x)
        gB = np.zeros_like(x)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h
            Pp, Vp, bp, _ = self.pieces(x + e)
            Pm, Vm, bm, _ = self.pieces(x - e)
            gP[i] = (Pp - Pm) / (2 * h)
            gV[i] = (Vp - Vm) / (2 * h)
            if b0 is not None:
                gB[i] = (bp - bm) / (2 * h)
        smooth = gP.copy()
        if b0 is not None:
            smooth += 0.25 * np.sign(b0 - cfg.eps) * gB
        gap = V0 - self.omega
        on_kink = abs(gap) <= KINK_TOL * self.omega
        g = smooth + cfg.lam * (0.0 if on_kink else np.sign(gap)) * gV
        if on_kink:
            vv = float(gV @ gV)
            sv = 0.0 if vv == 0.0 else float(np.clip(-(smooth @ gV) / (cfg.lam * vv), -1.0, 1.0))
            stat = float(np.linalg.norm(smooth + cfg.lam * sv * gV))
        else:
            stat = float(np.linalg.norm(g))
        return g, stat

    def volume_projection(self, x: np.ndarray) -> Optional[np.ndarray]:
        """Same shape modes with the constant mode moved onto |E| = omega_n."""
        s = 1.0 - 0.5 * float(np.sum(x[1:] ** 2))
        if s <= 0.0:
            return None
        y = x.copy()
        y[0] = math.sqrt(s) - 1.0
        return y


def minimize(init: RadialGraph2D, config: FlowConfig) -> FlowResult:
    """Gradient descent with backtracking on the coefficient vector.

    Each trial step is compared with its volume projection (constant mode moved
    to the kink of the volume penalty) and the lower-energy candidate is kept.
    Only strictly decreasing steps are accepted.
    """
    prob = _Problem(config)
    x = pack(init, config.K)
    if not prob.feasible(x):
        raise ValueError("initial shape violates 0 < 1 + u < R0")
    if config.eps is not None:
        # full multistart once, warm starts afterwards
        _, prob.center = fn.beta_squared(unpack(x), config.N)
    t = prob.terms(x)
    eta = config.step
    traj = [FlowState(0, x.copy(), t.total, t.P, t.vol_pen, t.osc_pen, t.V, 0.0, eta, beta2=t.beta2)]
    projections = 0
    failed = False
    converged = False
    for it in range(1, config.max_iter + 1):
        g, stat = prob.gradient(x)
        if stat < config.gtol:
            converged = True
            break
        accepted = None
        for _ in range(config.max_backtracks):
            trial = x - eta * g
            cands = []
            if prob.feasible(trial):
                cands.append(trial)
            else:
                projections += 1
            proj = prob.volume_projection(trial)
            if proj is not None and prob.feasible(proj):
                cands.append(proj)
            best = None
            for c in cands:
                tc = prob.terms(c)
                if best is None or tc.total < best[1].total:
                    best = (c, tc)
            if best is not None and best[1].total < t.total:
                accepted = best
                break
            eta *= 0.5
        if accepted is None:
            failed = True
            logger.info("line search failed at iteration %d (stationarity %.2e)", it, stat)
            break
        x_new, t = accepted
        step_norm = float(np.linalg.norm(x_new - x))
        x = x_new
        if t.center is not None:
            prob.center = t.center
        traj.append(FlowState(it, x.copy(), t.total, t.P, t.vol_pen, t.osc_pen, t.V, step_norm, eta, beta2=t.beta2))
        eta = min(2.0 * eta, 1.0)
        if step_norm < config.tol:
            converged = True
            break
    confirmed = penalized_energy(unpack(x), config) if config.eps is not None else None
    traj[-1].converged = converged
    return FlowResult(traj, converged, failed, projections, confirmed)


def directional_derivative_check(
    x: np.ndarray, config: FlowConfig, directions: int = 10, seed: int = 0
) -> np.ndarray:
    """Relative gap between central differences at h and h/2 along random directions."""
    prob = _Problem(config)
    if config.eps is not None:
        _, prob.center = fn.beta_squared(unpack(x), config.N)
    rng = np.random.default_rng(seed)
    h = config.fd_step
    out = []
    for _ in range(directions):
        d = rng.normal(size=len(x))
        d /= np.linalg.norm(d)
        f = lambda s: prob.terms(x + s * d).total  # noqa: E731
        d1 = (f(h) - f(-h)) / (2 * h)
        d2 = (f(h / 2) - f(-h / 2)) / h
        out.append(abs(d1 - d2) / max(abs(d1), abs(d2), 1e-12))
    return np.array(out)


# --------------------------------------------------------------------------
# ball-uniqueness experiment
# --------------------------------------------------------------------------


def random_initial_shape(seed: int, index: int, modes: Sequence[int] = range(2, 7), amplitude: float = 0.15) -> RadialGraph2D:
    """Random perturbation of the unit circle with sup|u| drawn in [amplitude/3, amplitude]."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    K = max(modes)
    a = np.zeros(K)
    b = np.zeros(K)
    for k in modes:
        a[k - 1], b[k - 1] = rng.normal(size=2)
    theta = 2.0 * np.pi * np.arange(1024) / 1024
    kt = np.outer(theta, np.arange(1, K + 1))
    sup = float(np.max(np.abs(np.cos(kt) @ a + np.sin(kt) @ b)))
    s = rng.uniform(amplitude / 3.0, amplitude) / sup
    return RadialGraph2D(0.0, a * s, b * s)


@dataclass
class RunSummary:
    index: int
    iterations: int
    converged: bool
    final_energy: float
    final_D: float
    final_volume_gap: float
    min_energy: float
    isoperimetric_ok: bool


@dataclass
class UniquenessReport:
    runs: list[RunSummary]
    fraction_converged: float
    max_volume_gap: float
    min_energy: float
    ball_energy: float
    D_threshold: float = 1e-3

    def to_dict(self) -> dict:
        d = asdict(self)
        return d


def _run_seed(args) -> RunSummary:
    config, seed, index, modes, amplitude = args
    init = random_initial_shape(seed, index, modes, amplitude)
    res = minimize(init, config)
    n = config.n
    w = geo.ball_volume(n)
    iso_ok = True
    for s in res.trajectory:
        iso = n * w ** (1.0 / n) * s.V ** ((n - 1) / n)
        iso_ok &= s.P >= iso - 1e-6
    final = res.final.shape
    return RunSummary(
        index=index,
        iterations=res.final.iteration,
        converged=res.converged,
        final_energy=res.final.energy,
        final_D=fn.deficit(final),
        final_volume_gap=abs(geo.volume(final) - w),
        min_energy=min(s.energy for s in res.trajectory),
        isoperimetric_ok=bool(iso_ok),
    )


def ball_uniqueness_experiment(
    config: FlowConfig,
    seeds: int = 20,
    seed: int = 0,
    modes: Sequence[int] = range(2, 7),
    amplitude: float = 0.15,
    threads: int = 1,
    D_threshold: float = 1e-3,
) -> UniquenessReport:
    """Run the volume-penalized flow (no oscillation term) from random perturbations."""
    if config.eps is not None:
        config = FlowConfig(**{**asdict(config), "eps": None})
    jobs = [(config, seed, i, tuple(modes), amplitude) for i in range(seeds)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            runs = list(ex.map(_run_seed, jobs))
    else:
        runs = [_run_seed(j) for j in jobs]
    w = geo.ball_volume(config.n)
    ok = [r.final_D <= D_threshold and r.final_volume_gap <= D_threshold for r in runs]
    return UniquenessReport(
        runs=runs,
        fraction_converged=sum(ok) / len(runs),
        max_volume_gap=max(r.final_volume_gap for r in runs),
        min_energy=min(r.min_energy for r in runs),
        ball_energy=config.n * w,
        D_threshold=D_threshold,
    )


def write_trajectory(states: Iterable[FlowState], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in states:
            fh.write(s.to_json() + "\n")
