"""Quantitative isoperimetric indices of planar and spatial shapes.

Exit status: 0 on success, 2 when an input fails validation, 3 when a
computed shape violates one of the checked inequalities.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import functionals as fn
from . import geometry as geo
from . import harness
from . import shapeflow as sf
from .corpus import CorpusSpec
from .shape_io import load_json, load_shape
from .spherical import fuglede_survey

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VIOLATION = 3

logger = logging.getLogger("isoquant")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(obj, out: Optional[str] = None) -> None:
    text = json.dumps(obj, indent=2, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _int_range(text: str) -> range:
    """Parse ``2..8`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return range(int(lo), int(hi) + 1)
        k = int(text)
        return range(k, k + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K or K..M, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t not in ("", "...", "…")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _settings(args) -> harness.PanelSettings:
    return harness.PanelSettings(N=args.quadrature_n, sp_tol=args.tol, identity_tol=args.tol)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_eval(args) -> int:
    shape = load_shape(args.shape)
    s = _settings(args)
    rep = fn.inequality_panel(shape, s.N, sp_tol=s.sp_tol, identity_tol=s.identity_tol)
    _dump({"kind": shape.kind, **rep.full_dict()}, args.output)
    if rep.violations and rep.D > harness.VALID_D:
        for v in rep.violations:
            logger.error("violation: %s", v)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_corpus(args) -> int:
    spec = CorpusSpec.from_dict(load_json(args.spec))
    if args.seed is not None:
        spec.seed = args.seed
    settings = _settings(args)
    if settings.N is None:
        settings.N = spec.N
    rows = harness.run_corpus(spec, threads=args.threads, settings=settings)
    text = harness.rows_to_csv(rows)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    failed = [r["shape"] for r in rows if r["error"]]
    if failed:
        logger.warning("%d shape(s) failed: %s", len(failed), ", ".join(failed))
    bad = harness.violations(rows)
    for ident, msg in bad:
        logger.error("%s: %s", ident, msg)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_constants(args) -> int:
    rows = harness.read_csv(args.csv)
    refined = harness.read_csv(args.refined) if args.refined else None
    rep = harness.estimate_constants(rows, refined=refined)
    _dump(rep.to_dict(), args.output)
    return EXIT_OK


def cmd_fuglede(args) -> int:
    seed = 0 if args.seed is None else args.seed
    s = fuglede_survey(args.samples, args.modes, seed, args.scale, args.quadrature_n)
    _dump(
        {
            "samples": args.samples,
            "modes": [args.modes.start, args.modes.stop - 1],
            "seed": seed,
            "scale": args.scale,
            "infimum": s.infimum,
            "argmin": s.argmin,
            "infimum_refined": s.infimum_refined,
            "small_fraction": s.small_fraction,
            "ratios": s.ratios,
        },
        args.output,
    )
    return EXIT_OK if s.infimum > 0 else EXIT_VIOLATION


def cmd_flow(args) -> int:
    seed = 0 if args.seed is None else args.seed
    init = sf.random_initial_shape(seed, args.index, args.modes, args.amplitude)
    config = sf.FlowConfig(
        lam=args.lam,
        eps=args.eps,
        R0=args.R0,
        max_iter=args.max_iter,
        K=max(args.K, init.kmax),
        N=args.quadrature_n or sf.FlowConfig.N,
    )
    res = sf.minimize(init, config)
    if args.output:
        sf.write_trajectory(res.trajectory, args.output)
    else:
        for s in res.trajectory:
            sys.stdout.write(s.to_json() + "\n")
    fin = res.final
    logger.info(
        "flow finished: %d iterations, converged=%s, energy=%.12g", fin.iteration, res.converged, fin.energy
    )
    floor = config.n * geo.ball_volume(config.n) - 1e-6
    if any(s.energy < floor for s in res.trajectory):
        logger.error("energy fell below the ball energy")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_refine(args) -> int:
    shape = load_shape(args.shape)
    table = harness.refinement_study(shape, args.N, reference_gamma=args.reference_gamma)
    _dump(table.to_dict(), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    """Global flags; the copy attached to subcommands has no defaults so it
    does not clobber values given before the subcommand name."""

    def d(value):
        return argparse.SUPPRESS if suppress else value

    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--quadrature-n", type=int, default=d(None), metavar="N", help="boundary quadrature nodes")
    g.add_argument("--tol", type=float, default=d(1e-6), help="tolerance for the inequality assertions")
    g.add_argument("--threads", type=int, default=d(1), help="worker processes for corpus evaluation")
    g.add_argument("--seed", type=int, default=d(None), help="random seed")
    g.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return g


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isoquant", description=__doc__.splitlines()[0], parents=[_global_flags(False)])
    common = _global_flags(True)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "evaluate one shape file")
    sp.add_argument("shape")
    sp.add_argument("-o", "--output", default=None)

    sp = add("corpus", cmd_corpus, "evaluate a generated corpus to CSV")
    sp.add_argument("spec")
    sp.add_argument("-o", "--output", default=None)

    sp = add("constants", cmd_constants, "empirical constants from a corpus CSV")
    sp.add_argument("csv")
    sp.add_argument("--refined", default=None, help="same corpus at doubled resolution")
    sp.add_argument("-o", "--output", default=None)

    sp = add("fuglede", cmd_fuglede, "Fuglede ratio survey over random perturbations")
    sp.add_argument("--modes", type=_int_range, default=range(2, 9))
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--scale", type=float, default=0.02)
    sp.add_argument("-o", "--output", default=None)

    sp = add("flow", cmd_flow, "penalized-energy descent from a random perturbation")
    sp.add_argument("--lambda", dest="lam", type=float, default=3.0)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--R0", type=float, default=2.0)
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--modes", type=_int_range, default=range(2, 7))
    sp.add_argument("--amplitude", type=float, default=0.15)
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--K", type=int, default=8)
    sp.add_argument("-o", "--output", default=None)

    sp = add("refine", cmd_refine, "quadrature refinement study for one shape")
    sp.add_argument("shape")
    sp.add_argument("--N", type=_int_list, default=[512, 1024, 2048, 4096])
    sp.add_argument("--reference-gamma", type=float, default=None)
    sp.add_argument("-o", "--output", default=None)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"isoquant: error: {exc}\n")
        return EXIT_INVALID
