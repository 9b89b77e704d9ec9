"""Numerical isoperimetric functionals on polygons and radial graphs."""

from .geometry import (
    BallSpec,
    BoundaryQuadrature,
    Polygon2D,
    RadialGraph2D,
    RadialGraph3D,
    ball_perimeter,
    ball_volume,
    boundary_quadrature,
    perimeter,
    polygon,
    rescale_to_unit_volume,
    scale,
    sym_diff_with_ball,
    translate,
    volume,
)
from .functionals import (
    FunctionalReport,
    asymmetry_A,
    beta,
    deficit,
    fraenkel,
    gamma,
    inequality_panel,
    strong_poincare_check,
)

__version__ = "0.1.0"
