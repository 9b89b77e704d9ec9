import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from isoquant import geometry as geo
from isoquant.clip import polygon_disk_area, polygon_is_simple
from isoquant.corpus import l_shape, regular_ngon, star
from isoquant.geometry import BallSpec, RadialGraph2D, RadialGraph3D, polygon


def test_ball_constants():
    assert geo.ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
    assert geo.ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)
    assert geo.ball_perimeter(3, 2.0) == pytest.approx(16 * math.pi, rel=1e-15)
    with pytest.raises(ValueError):
        geo.ball_volume(4)


# --------------------------------------------------------------------------
# representations
# --------------------------------------------------------------------------


def test_clockwise_input_is_reoriented():
    p = polygon([[0, 0], [0, 1], [1, 1], [1, 0]])
    assert geo.volume(p) == pytest.approx(1.0)


def test_polygon_rejects_clockwise_direct_construction():
    with pytest.raises(ValueError):
        geo.Polygon2D(np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=float))


def test_degenerate_polygon_rejected():
    with pytest.raises(ValueError):
        polygon([[0, 0], [1, 1], [2, 2]])


def test_self_intersecting_polygon_rejected():
    with pytest.raises(ValueError):
        polygon([[0, 0], [1, 1], [1, 0], [0, 1]])


def test_simple_check_on_nonconvex_shapes():
    assert polygon_is_simple(star(7, 0.4).vertices)
    assert polygon_is_simple(l_shape().vertices)


def test_radial_graph_must_stay_star_shaped():
    with pytest.raises(ValueError):
        RadialGraph2D(0.0, [0.0, 1.2], [])
    with pytest.raises(ValueError):
        RadialGraph3D(np.full((8, 16), -1.0))


def test_sample_needs_more_than_2k_nodes():
    u = RadialGraph2D(0.0, np.zeros(10), [])
    with pytest.raises(ValueError):
        u.sample(20)


def test_radial_graph_values_match_direct_sum():
    u = RadialGraph2D(0.01, [0.02, -0.03, 0.01], [0.0, 0.015, -0.02])
    th, r, dr = u.sample(64)
    assert np.allclose(r, 1 + u.u(th), atol=1e-15)
    assert np.allclose(dr, u.du(th), atol=1e-15)


# --------------------------------------------------------------------------
# volume and perimeter
# --------------------------------------------------------------------------


def test_circle_volume_and_perimeter(disk):
    assert geo.volume(disk) == pytest.approx(math.pi, abs=1e-13)
    for N in (64, 256, 4096):
        assert abs(geo.perimeter(disk, N) - 2 * math.pi) <= 1e-12


def test_square_measures(sq):
    assert geo.volume(sq) == pytest.approx(math.pi, rel=1e-15)
    assert geo.perimeter(sq) == pytest.approx(oracles.SQUARE_P, rel=1e-15)


def test_mode2_volume_with_exact_a0():
    t = 0.01
    a0 = math.sqrt(1 - t * t / 2) - 1
    u = RadialGraph2D(a0, [0.0, t], [])
    assert abs(geo.volume(u) - math.pi) <= 1e-10


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7, 8, 12, 20])
def test_regular_ngon_perimeter_closed_form(N):
    assert geo.perimeter(regular_ngon(N)) == pytest.approx(oracles.ngon_perimeter(N), rel=1e-13)


def test_hexagon_perimeter(hexagon):
    # closed form 2 sqrt(6 pi tan(pi/6)) = 6.5978167
    assert geo.perimeter(hexagon) == pytest.approx(6.597816664747606, abs=1e-12)


def test_ngon_deficit_decays_quadratically():
    D = [geo.perimeter(regular_ngon(N)) - 2 * math.pi for N in (64, 128, 256)]
    assert D[0] / D[1] == pytest.approx(4.0, rel=1e-2)
    assert D[1] / D[2] == pytest.approx(4.0, rel=1e-2)


def test_radial_perimeter_against_adaptive_quadrature():
    u = RadialGraph2D(-0.004, [0.0, 0.05, 0.03], [0.02, 0.0, -0.01])
    ref = oracles.radial_perimeter(lambda t: 1 + float(u.u(t)), lambda t: float(u.du(t)))
    assert geo.perimeter(u, 512) == pytest.approx(ref, abs=1e-12)


def test_sphere_measures():
    s = RadialGraph3D(np.zeros((32, 64)))
    assert geo.volume(s) == pytest.approx(4 * math.pi / 3, rel=1e-13)
    assert geo.perimeter(s) == pytest.approx(4 * math.pi, rel=1e-13)


def test_radial3d_scaled_sphere():
    s = RadialGraph3D(np.full((16, 32), 0.5))
    assert geo.volume(s) == pytest.approx(4 * math.pi / 3 * 1.5**3, rel=1e-13)
    assert geo.perimeter(s) == pytest.approx(4 * math.pi * 1.5**2, rel=1e-13)


@given(st.floats(0.2, 5.0), st.sampled_from(["square", "hex", "radial"]))
def test_scaling_laws(lam, which):
    shape = {
        "square": polygon([[0, 0], [2, 0], [2, 1], [0, 1]]),
        "hex": regular_ngon(6),
        "radial": RadialGraph2D(0.0, [0.01, 0.05], [0.02, 0.0]),
    }[which]
    s = geo.scale(shape, lam)
    assert geo.volume(s) == pytest.approx(lam**2 * geo.volume(shape), rel=1e-12)
    assert geo.perimeter(s) == pytest.approx(lam * geo.perimeter(shape), rel=1e-12)


def test_rescale_to_unit_volume(disk):
    _, lam = geo.rescale_to_unit_volume(disk)
    assert lam == pytest.approx(1.0, rel=1e-14)
    _, lam = geo.rescale_to_unit_volume(geo.scale(disk, 2.0))
    assert lam == pytest.approx(0.5, rel=1e-14)
    unit = polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    s, lam = geo.rescale_to_unit_volume(unit)
    assert lam == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert abs(geo.volume(s) - math.pi) <= 1e-10


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


def test_quadrature_minimum_nodes(sq):
    with pytest.raises(ValueError):
        geo.boundary_quadrature(sq, 8)


def test_circle_quadrature(disk):
    q = geo.boundary_quadrature(disk, 256)
    assert abs(q.total() - 2 * math.pi) <= 1e-10
    assert np.allclose(q.normals, q.points / np.linalg.norm(q.points, axis=1)[:, None], atol=1e-14)


def test_square_quadrature_exact(sq):
    q = geo.boundary_quadrature(sq, 256)
    assert q.N == 256
    assert q.total() == pytest.approx(oracles.SQUARE_P, rel=1e-14)
    assert np.all(q.weights > 0)


@pytest.mark.parametrize(
    "shape",
    [
        regular_ngon(6),
        star(5, 0.5),
        RadialGraph2D(0.0, [0.03, 0.1, -0.02], [0.0, 0.04, 0.01]),
    ],
    ids=["hexagon", "star", "radial2d"],
)
def test_closed_boundary_identity(shape):
    q = geo.boundary_quadrature(shape, 1024)
    assert np.allclose(np.linalg.norm(q.normals, axis=1), 1.0, atol=1e-12)
    assert np.linalg.norm(q.weights @ q.normals) <= 1e-12 * q.total()


def _tilted_3d(nlat):
    theta, phi, _ = geo.sphere_grid(nlat, 2 * nlat)
    vals = 0.05 * np.cos(theta)[:, None] ** 2 + 0.03 * np.outer(np.sin(theta), np.cos(phi))
    return RadialGraph3D(vals)


def test_closed_boundary_identity_3d_second_order():
    # latitude derivatives are second-order finite differences
    err = []
    for nlat in (32, 64):
        q = geo.boundary_quadrature(_tilted_3d(nlat))
        assert np.allclose(np.linalg.norm(q.normals, axis=-1), 1.0, atol=1e-12)
        err.append(np.linalg.norm(q.weights @ q.normals))
    assert err[1] <= 1e-4
    assert err[0] / err[1] > 3.0


def test_divergence_theorem_gives_volume():
    # (1/n) sum w x.nu = |E|
    u = RadialGraph2D(0.0, [0.02, 0.08], [0.0, 0.03])
    q = geo.boundary_quadrature(u, 512)
    assert 0.5 * np.sum(q.weights * np.sum(q.points * q.normals, axis=1)) == pytest.approx(geo.volume(u), rel=1e-13)


# --------------------------------------------------------------------------
# barycenter and translation
# --------------------------------------------------------------------------


def test_barycenter(sq, disk):
    assert np.allclose(geo.barycenter(disk), 0.0, atol=1e-15)
    assert np.allclose(geo.barycenter(geo.translate(sq, [0.3, 0.0])), [0.3, 0.0], atol=1e-14)


def test_first_mode_barycenter_against_polar_quadrature():
    u = RadialGraph2D(0.0, [0.05], [])
    radius = lambda t: 1 + 0.05 * math.cos(t)  # noqa: E731
    cx, cy = oracles.radial_moment(radius)
    assert np.allclose(geo.barycenter(u), np.array([cx, cy]) / geo.volume(u), atol=1e-13)


def test_translate_square_exact(sq):
    t = geo.translate(sq, [1.0, 1.0])
    assert np.array_equal(t.vertices, sq.vertices + 1.0)


def test_translate_round_trip_bitwise(hexagon):
    v = np.array([0.123456789, -0.987654321])
    back = geo.translate(geo.translate(hexagon, v), -v)
    assert np.array_equal(back.vertices, hexagon.vertices)


def test_translate_circle_polygonizes(disk):
    t = geo.translate(disk, [0.5, 0.0], resolution=4096)
    assert t.kind == "polygon2d"
    assert abs(geo.perimeter(t) - 2 * math.pi) <= 1e-6
    assert abs(geo.volume(t) - math.pi) <= 1e-5
    assert np.allclose(geo.barycenter(t), [0.5, 0.0], atol=1e-12)


def test_translate_rejects_coarse_resolution():
    u = RadialGraph2D(0.0, np.r_[np.zeros(15), 0.01], [])
    with pytest.raises(ValueError, match="too coarse"):
        geo.translate(u, [0.1, 0.0], resolution=64)


def test_translate_radial3d():
    s = RadialGraph3D(np.zeros((48, 96)))
    t = geo.translate(s, [0.1, 0.0, 0.05])
    assert np.allclose(geo.barycenter(t), [0.1, 0.0, 0.05], atol=1e-4)
    assert geo.volume(t) == pytest.approx(4 * math.pi / 3, rel=1e-4)
    assert geo.perimeter(t) == pytest.approx(4 * math.pi, rel=1e-4)


# --------------------------------------------------------------------------
# symmetric difference with a ball
# --------------------------------------------------------------------------


def test_sym_diff_unit_ball(disk):
    assert geo.sym_diff_with_ball(disk, BallSpec(np.zeros(2), 1.0)) <= 1e-12


def test_sym_diff_square_segments(sq):
    val = geo.sym_diff_with_ball(sq, BallSpec(np.zeros(2), 1.0))
    assert val == pytest.approx(oracles.SQUARE_ALPHA, abs=1e-12)
    assert val == pytest.approx(0.5689171008, abs=1e-10)


def test_sym_diff_hexagon_segments(hexagon):
    val = geo.sym_diff_with_ball(hexagon, BallSpec(np.zeros(2), 1.0))
    assert val == pytest.approx(oracles.HEX_ALPHA, abs=1e-12)
    assert val == pytest.approx(0.2339410675, abs=1e-10)


@pytest.mark.parametrize("center", [(0.0, 0.0), (0.3, -0.2), (1.2, 0.4)])
def test_sym_diff_grid_oracle(center):
    shape = star(5, 0.5)
    val = geo.sym_diff_with_ball(shape, BallSpec(np.array(center), 1.0))
    ref = oracles.grid_sym_diff(shape.vertices, center, 1.0, M=1500)
    assert val == pytest.approx(ref, abs=2e-3)


def test_sym_diff_radial_lens():
    # two unit disks at distance d: lens = 2 acos(d/2) - (d/2) sqrt(4 - d^2)
    d = math.hypot(0.3, 0.1)
    lens = 2 * math.acos(d / 2) - (d / 2) * math.sqrt(4 - d * d)
    disk = RadialGraph2D(0.0, [], [])
    val = geo.sym_diff_with_ball(disk, BallSpec(np.array([0.3, 0.1]), 1.0), N=8192)
    assert val == pytest.approx(2 * (math.pi - lens), abs=1e-7)


def test_sym_diff_sphere_offset():
    # two unit balls at distance d: lens volume pi (4 + d)(2 - d)^2 / 12
    d = 0.2
    s = RadialGraph3D(np.zeros((64, 128)))
    lens = math.pi * (4 + d) * (2 - d) ** 2 / 12
    val = geo.sym_diff_with_ball(s, BallSpec(np.array([0.0, 0.0, d]), 1.0))
    # min(1, rho(z))^3 has a kink where the spheres cross: algebraic, not spectral
    assert val == pytest.approx(2 * (4 * math.pi / 3 - lens), abs=1e-3)


@given(
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.floats(-1, 1),
    st.floats(-1, 1),
    st.floats(0.3, 2.0),
)
def test_sym_diff_translation_invariance(vx, vy, cx, cy, r):
    shape = star(5, 0.55)
    v = np.array([vx, vy])
    c = np.array([cx, cy])
    a = geo.sym_diff_with_ball(shape, BallSpec(c, r))
    b = geo.sym_diff_with_ball(geo.translate(shape, v), BallSpec(c + v, r))
    assert a == pytest.approx(b, abs=1e-10)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0.1, 2.5))
def test_polygon_disk_area_bounds(cx, cy, r):
    v = regular_ngon(7).vertices
    area = polygon_disk_area(v, np.array([cx, cy]), r)
    assert -1e-12 <= area <= min(math.pi, math.pi * r * r) + 1e-12


def test_sym_diff_symmetric_for_polygonized_ball():
    poly = geo.polygonize(RadialGraph2D(0.0, [], []), 4096)
    a = geo.sym_diff_with_ball(poly, BallSpec(np.array([0.2, 0.1]), 1.0))
    b = geo.sym_diff_with_ball(geo.translate(poly, [-0.2, -0.1]), BallSpec(np.zeros(2), 1.0))
    assert a == pytest.approx(b, abs=1e-10)
