"""Batch evaluation, CSV reporting and empirical constant estimation."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import functionals as fn
from . import geometry as geo
from .corpus import CorpusItem, CorpusSpec
from .geometry import Shape

logger = logging.getLogger(__name__)

VALID_D = 1e-10
MODE2_BOUND = 32.0 / (3.0 * math.pi)

CSV_COLUMNS = ("shape", "kind", "n", "N") + fn.REPORT_FIELDS + ("sp_slack", "violations", "error")
VECTOR_FIELDS = ("y_star", "y_alpha", "y_A")
TEXT_FIELDS = ("shape", "kind", "violations", "error")
INT_FIELDS = ("n", "N")


class CsvFormatError(ValueError):
    """Malformed results CSV."""


@dataclass
class PanelSettings:
    N: Optional[int] = None
    sp_tol: float = 1e-6
    order_tol: float = 1e-8
    identity_tol: float = 1e-6


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


def evaluate_shape(shape: Shape, settings: PanelSettings = PanelSettings()) -> fn.FunctionalReport:
    unit, _ = geo.rescale_to_unit_volume(shape)
    return fn.inequality_panel(
        unit,
        settings.N,
        sp_tol=settings.sp_tol,
        order_tol=settings.order_tol,
        identity_tol=settings.identity_tol,
    )


def _row(item: CorpusItem, settings: PanelSettings) -> dict:
    row = {c: None for c in CSV_COLUMNS}
    row["shape"] = item.ident
    row["N"] = settings.N
    if item.shape is None:
        row["error"] = item.error
        return row
    row["kind"] = item.shape.kind
    row["n"] = item.shape.n
    try:
        rep = evaluate_shape(item.shape, settings)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        logger.warning("%s failed: %s", item.ident, exc)
        row["error"] = f"evaluation-failed: {exc}"
        return row
    row.update(rep.to_dict())
    row["sp_slack"] = rep.sp_slack
    row["violations"] = "; ".join(rep.violations) or None
    return row


def _row_task(args) -> dict:
    return _row(*args)


def run_corpus(
    spec: CorpusSpec,
    threads: int = 1,
    settings: Optional[PanelSettings] = None,
) -> list[dict]:
    """Evaluate every corpus item; one row per item, in generation order.

    A failing item yields a row with ``error`` set and the run continues.
    """
    settings = settings or PanelSettings(N=spec.N)
    items = spec.items()
    tasks = [(it, settings) for it in items]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_row_task, tasks, chunksize=1))
    return [_row_task(t) for t in tasks]


def violations(rows: Iterable[dict]) -> list[tuple[str, str]]:
    """Assertion failures on rows with D > 1e-10."""
    out = []
    for r in rows:
        if r.get("error") or not r.get("violations"):
            continue
        if r["D"] is not None and r["D"] > VALID_D:
            out.append((r["shape"], r["violations"]))
    return out


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def _cell(name: str, val) -> str:
    if val is None:
        return ""
    if name in VECTOR_FIELDS:
        return " ".join(repr(float(c)) for c in val)
    if name in TEXT_FIELDS:
        return str(val)
    if name in INT_FIELDS:
        return str(int(val))
    return repr(float(val))


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_cell(c, r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


def _parse_cell(name: str, text: str):
    if text == "":
        return None
    if name in TEXT_FIELDS:
        return text
    if name in INT_FIELDS:
        return int(text)
    if name in VECTOR_FIELDS:
        return np.array([float(t) for t in text.split()])
    return float(text)


def read_csv(path) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise CsvFormatError(f"{path}: empty file, expected a header row")
    missing = [c for c in ("shape", "D", "A", "beta", "alpha") if c not in reader.fieldnames]
    if missing:
        raise CsvFormatError(f"{path}: missing columns {', '.join(missing)}")
    rows = []
    for lineno, raw in enumerate(reader, start=2):
        try:
            rows.append({k: _parse_cell(k, v or "") for k, v in raw.items() if k is not None})
        except ValueError as exc:
            raise CsvFormatError(f"{path}:{lineno}: {exc}") from None
    return rows


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------


@dataclass
class Extremum:
    value: float
    shape: str


@dataclass
class ConstantsReport:
    C_main: Extremum
    C_prop: Extremum
    alpha2_over_D: Extremum
    C_0: Optional[Extremum] = None
    fuglede_c: Optional[Extremum] = None
    worst: dict = field(default_factory=dict)
    deltas: dict = field(default_factory=dict)
    valid_rows: int = 0
    mode2_bound: float = MODE2_BOUND

    @property
    def lower_bound_holds(self) -> bool:
        return self.C_main.value >= self.alpha2_over_D.value

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lower_bound"] = {
            "reference_32_over_3pi": MODE2_BOUND,
            "max_alpha2_over_D": self.alpha2_over_D.value,
            "shape": self.alpha2_over_D.shape,
            "C_main_ge_bound": self.lower_bound_holds,
        }
        return out


def _valid(rows: Iterable[dict]) -> list[dict]:
    return [
        r
        for r in rows
        if not r.get("error") and r.get("D") is not None and r["D"] > VALID_D and r.get("beta") and r.get("A") is not None
    ]


def _metrics(r: dict) -> dict:
    D, A, b, a = r["D"], r["A"], r["beta"], r["alpha"]
    return {
        "A2_over_D": A * A / D,
        "prop": (A + math.sqrt(D)) / b,
        "alpha2_over_D": a * a / D,
        "beta2_over_D": b * b / D,
    }


def _argmax(rows: list[dict], key: str) -> Extremum:
    best = max(rows, key=lambda r: r["_m"][key])
    return Extremum(best["_m"][key], best["shape"])


def estimate_constants(
    rows: Sequence[dict],
    refined: Optional[Sequence[dict]] = None,
    fuglede_ratios: Optional[Sequence[tuple[str, float]]] = None,
    worst: int = 3,
) -> ConstantsReport:
    """Empirical constants over rows with D > 1e-10.

    ``refined`` holds the same corpus at doubled resolution; matching shapes
    contribute relative deltas of each ratio.
    """
    valid = [dict(r, _m=_metrics(r)) for r in _valid(rows)]
    if not valid:
        raise ValueError("no valid rows: need at least one shape with D > 1e-10 and no error")
    spherical = [r for r in valid if str(r.get("kind", "")).startswith("radial")]
    rep = ConstantsReport(
        C_main=_argmax(valid, "A2_over_D"),
        C_prop=_argmax(valid, "prop"),
        alpha2_over_D=_argmax(valid, "alpha2_over_D"),
        C_0=_argmax(spherical, "A2_over_D") if spherical else None,
        valid_rows=len(valid),
    )
    if fuglede_ratios:
        ident, val = min(fuglede_ratios, key=lambda t: t[1])
        rep.fuglede_c = Extremum(float(val), ident)
    for key in ("A2_over_D", "prop", "alpha2_over_D"):
        ranked = sorted(valid, key=lambda r: -r["_m"][key])[:worst]
        rep.worst[key] = [{"shape": r["shape"], "value": r["_m"][key]} for r in ranked]
    if refined is not None:
        fine = {r["shape"]: _metrics(r) for r in _valid(refined)}
        for key in ("A2_over_D", "prop", "beta2_over_D"):
            per = {}
            for r in valid:
                if r["shape"] in fine:
                    v0, v1 = r["_m"][key], fine[r["shape"]][key]
                    per[r["shape"]] = abs(v1 - v0) / abs(v0)
            if per:
                ident = max(per, key=per.get)
                rep.deltas[key] = {"max_relative": per[ident], "shape": ident, "compared": len(per)}
    return rep


# --------------------------------------------------------------------------
# refinement
# --------------------------------------------------------------------------


@dataclass
class RefinementRow:
    N: int
    P: float
    gamma: float
    beta2: float
    residual: float
    gamma_error: Optional[float] = None


@dataclass
class RefinementTable:
    rows: list[RefinementRow]
    gamma_order: list[Optional[float]]
    P_order: list[Optional[float]]
    reference_gamma: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _orders(errors: Sequence[float], Ns: Sequence[int], floor: float) -> list[Optional[float]]:
    """Observed order between consecutive resolutions; ``None`` once either
    error is at the noise floor."""
    out: list[Optional[float]] = []
    for i in range(len(errors) - 1):
        e0, e1 = errors[i], errors[i + 1]
        if e0 <= floor or e1 <= floor:
            out.append(None)
        else:
            out.append(math.log(e0 / e1) / math.log(Ns[i + 1] / Ns[i]))
    return out


def refinement_study(shape: Shape, N_list: Sequence[int], reference_gamma: Optional[float] = None) -> RefinementTable:
    """P, gamma, beta^2 and the identity residual at each resolution.

    Errors are measured against ``reference_gamma`` when given, otherwise
    against the finest resolution.
    """
    Ns = [int(N) for N in N_list]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("N_list must be strictly ascending")
    rows = []
    for N in Ns:
        P = fn._perimeter(shape, N)
        g = fn.gamma(shape, N).gamma
        b = fn.beta(shape, N)
        rows.append(RefinementRow(N, P, g, b.beta**2, b.residual))
    ref_g = reference_gamma if reference_gamma is not None else rows[-1].gamma
    for r in rows:
        r.gamma_error = abs(r.gamma - ref_g)
    floor = 1e-13 * max(1.0, abs(ref_g))
    g_err = [r.gamma_error for r in rows]
    P_err = [abs(r.P - rows[-1].P) for r in rows]
    if reference_gamma is None:
        g_err, P_err = g_err[:-1], P_err[:-1]
    return RefinementTable(rows, _orders(g_err, Ns, floor), _orders(P_err, Ns, 1e-13 * rows[-1].P), reference_gamma)
