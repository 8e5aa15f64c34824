"""Intrinsic-graph areas, characteristic curves, lifts, z-graphs.

Closed-form oracles.  The two-half-plane surface with a flat fan at height
zero (y = -u x for z > 0, y = u x for z < 0, the sector |y| <= u|x| in
{z = 0}) has intrinsic graph function

    b_u(x, z) = -u x            for z >  u x^2 / 2
              = -2 z / x        for |z| <= u x^2 / 2   (the fan wedge)
              =  u x            for z < -u x^2 / 2

with gradient -2z/x^2 on the wedge and -+u outside.  Wedge integrals (u=1,
|x| <= 1) via z = (x^2/2) s:

    area   = int |x|^2/2 * sqrt(1+s^2) ds dx = (sqrt(2) + asinh 1) / 3
    energy = (1/2) int (2z/x^2)^2        = 1/9.

Characteristics of the fan satisfy g' = 2g/x, so they are parabolas C x^2.
A z-graph z = phi has perimeter density |(phi_x + y/2, phi_y - x/2)|: for
phi = +-xy/2 over the unit square this is |y| resp. |x| (area 1/2), and for
phi = 0 over the unit disk it is r/2 (area pi/3).
"""
import math

import numpy as np
import pytest

from heisurf.core import GroupPoint, V0Point, graph_point
from heisurf.graphs import (
    DomainError,
    LiftedCurve,
    PlanarCurve,
    ScalarField,
    characteristic_curve,
    dirichlet_energy,
    graph_area,
    horizontal_lift,
    intrinsic_gradient,
    zgraph_area,
)
from heisurf.quadrature import VRegion

WEDGE_AREA = (math.sqrt(2.0) + math.asinh(1.0)) / 3.0


def fan_field(u: float = 1.0) -> ScalarField:
    def fn(x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        safe = np.where(x != 0.0, x, 1.0)
        fan = -2.0 * z / safe
        return np.where(z > 0.5 * u * x * x, -u * x,
                        np.where(z < -0.5 * u * x * x, u * x, fan))

    return ScalarField.from_function(fn, (-1.0, 1.0, -1.0, 1.0),
                                     entire=True, name="fan")


def wedge_region(u: float = 1.0) -> VRegion:
    return VRegion(-1.0, 1.0,
                   lambda x: -0.5 * u * np.asarray(x) ** 2,
                   lambda x: 0.5 * u * np.asarray(x) ** 2)


def linear_field(m: float) -> ScalarField:
    return ScalarField.from_function(lambda x, z: m * x + 0.0 * z,
                                     (0.0, 1.0, 0.0, 1.0), entire=True)


# ---------------------------------------------------------------------------
# gradients


def test_gradient_of_linear_field_is_slope():
    f = linear_field(0.75)
    g = intrinsic_gradient(f, 0.3, 0.4)
    assert g == pytest.approx(0.75, abs=1e-10)


def test_gradient_on_fan_matches_closed_form():
    f = fan_field(1.0)
    g = intrinsic_gradient(f, 1.0, 0.25)
    assert g == pytest.approx(-0.5, abs=1e-6)
    g2 = intrinsic_gradient(f, 0.8, 0.31, clip=wedge_region())
    assert g2 == pytest.approx(-2.0 * 0.31 / 0.64, abs=1e-6)


def test_gradient_outside_fan_is_constant():
    f = fan_field(1.0)
    upper = VRegion(-1.0, 1.0, lambda x: 0.5 * np.asarray(x) ** 2,
                    lambda x: np.full(np.shape(x), 1.0))
    g = intrinsic_gradient(f, 0.8, 0.33, clip=upper)
    assert g == pytest.approx(-1.0, abs=1e-8)


def test_gradient_is_second_order():
    f = ScalarField.from_function(lambda x, z: np.sin(x) * np.cos(z),
                                  (-2.0, 2.0, -2.0, 2.0), entire=True)
    x, z = 0.3, 0.7
    exact = math.cos(x) * math.cos(z) + math.sin(x) ** 2 * math.cos(z) * math.sin(z)
    e1 = abs(intrinsic_gradient(f, x, z, h=1e-3) - exact)
    e2 = abs(intrinsic_gradient(f, x, z, h=5e-4) - exact)
    order = math.log2(e1 / e2)
    assert order > 1.9


def test_gradient_without_room_for_stencil_fails():
    f = ScalarField.from_function(lambda x, z: 0.0 * x, (0.0, 1.0, 0.0, 1.0))
    with pytest.raises(DomainError, match="boundary stencil"):
        intrinsic_gradient(f, 0.0, 0.5)


# ---------------------------------------------------------------------------
# area and energy


def test_area_of_tilted_plane_is_exact():
    f = linear_field(0.75)
    assert graph_area(f) == pytest.approx(math.sqrt(1.5625), abs=1e-10)


def test_energy_of_tilted_plane_is_exact():
    f = linear_field(0.75)
    assert dirichlet_energy(f) == pytest.approx(0.5 * 0.75 ** 2, abs=1e-10)


def test_fan_wedge_area_matches_closed_form():
    area = graph_area(fan_field(1.0), wedge_region())
    assert area == pytest.approx(WEDGE_AREA, rel=1e-4)


def test_fan_wedge_energy_matches_closed_form():
    energy = dirichlet_energy(fan_field(1.0), wedge_region())
    assert energy == pytest.approx(1.0 / 9.0, rel=1e-4)


def test_area_over_empty_region_is_zero():
    empty = VRegion(0.0, 1.0, lambda x: np.full(np.shape(x), 1.0),
                    lambda x: np.full(np.shape(x), 0.0))
    assert graph_area(linear_field(0.5), empty) == 0.0


def test_gridded_linear_field_reproduces_area():
    f = linear_field(0.75).sampled(9, 9)
    assert graph_area(f) == pytest.approx(math.sqrt(1.5625), abs=1e-9)


def test_bilinear_interpolation_reproduces_affine_data():
    xs = np.linspace(-1.0, 2.0, 5)
    zs = np.linspace(0.0, 3.0, 7)
    vals = 2.0 * xs[:, None] - 3.0 * zs[None, :] + 0.5
    f = ScalarField.from_samples(xs, zs, vals)
    rng = np.random.default_rng(7)
    x = rng.uniform(-1.0, 2.0, size=40)
    z = rng.uniform(0.0, 3.0, size=40)
    assert np.allclose(f(x, z), 2.0 * x - 3.0 * z + 0.5, atol=1e-12)


# ---------------------------------------------------------------------------
# graph map


def test_fan_graph_lands_on_the_two_half_planes():
    f = fan_field(1.0)
    for x in (-1.0, -0.5, 0.3, 1.0):
        for z in (-0.6, -0.1, 0.0, 0.1, 0.6):
            val = float(f(np.array(x), np.array(z)))
            p = graph_point(V0Point(x, z), val)
            if p.z > 1e-12:
                assert p.y == pytest.approx(-p.x, abs=1e-12)
            elif p.z < -1e-12:
                assert p.y == pytest.approx(p.x, abs=1e-12)
            else:
                assert abs(p.y) <= abs(p.x) + 1e-12


# ---------------------------------------------------------------------------
# characteristic curves


def test_fan_characteristic_is_a_parabola():
    xs, gs, meta = characteristic_curve(fan_field(1.0), (1.0, 0.25), 0.2)
    assert meta["uniqueness_guaranteed"]
    assert not meta["truncated"]
    assert np.max(np.abs(gs - 0.25 * xs ** 2)) < 1e-6


def test_characteristic_of_constant_slope_field():
    f = ScalarField.from_function(lambda x, z: -0.5 * x + 0.0 * z,
                                  (-2.0, 2.0, -2.0, 2.0), entire=True)
    xs, gs, _ = characteristic_curve(f, (0.0, 0.0), 1.0)
    assert gs[-1] == pytest.approx(0.25, abs=1e-9)


def test_characteristic_truncates_at_domain_boundary():
    f = ScalarField.from_function(lambda x, z: 0.0 * x, (0.0, 1.0, 0.0, 1.0))
    xs, gs, meta = characteristic_curve(f, (0.5, 0.5), 1.7)
    assert meta["truncated"]
    assert 0.99 < xs[-1] <= 1.0 + 1e-9


def test_characteristic_leaving_immediately_fails():
    f = ScalarField.from_function(lambda x, z: 0.0 * x, (0.0, 1.0, 0.0, 1.0))
    with pytest.raises(DomainError):
        characteristic_curve(f, (1.0, 0.5), 2.0)
    with pytest.raises(DomainError):
        characteristic_curve(f, (1.5, 0.5), 2.0)


def test_sqrt_field_is_flagged_non_unique():
    f = ScalarField.from_function(lambda x, z: 2.0 * np.sqrt(np.abs(z)) + 0.0 * x,
                                  (-1.0, 1.0, -1.0, 1.0), entire=True)
    _, _, meta = characteristic_curve(f, (0.0, 0.0), 0.5)
    assert not meta["uniqueness_guaranteed"]


# ---------------------------------------------------------------------------
# lifts


def test_lift_of_square_loop_climbs_by_enclosed_area():
    square = PlanarCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0],
                                   [0.0, 1.0], [0.0, 0.0]]))
    lifted = horizontal_lift(square, z0=0.0)
    assert lifted.points[-1, 2] == pytest.approx(1.0, abs=1e-14)
    assert lifted.residual() <= 1e-12


def test_lift_of_circle_climbs_by_pi():
    n = 200
    t = np.linspace(0.0, 2.0 * math.pi, n + 1)
    circle = PlanarCurve(np.stack([np.cos(t), np.sin(t)], axis=-1))
    lifted = horizontal_lift(circle, z0=-1.0)
    assert lifted.points[-1, 2] - lifted.points[0, 2] == pytest.approx(
        math.pi, rel=3e-4)


def test_non_horizontal_polyline_is_rejected():
    with pytest.raises(ValueError, match="residual"):
        LiftedCurve(np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]))


# ---------------------------------------------------------------------------
# z-graphs


def test_zgraph_area_of_lateral_planes():
    square = VRegion.rect(0.0, 1.0, 0.0, 1.0)
    a1 = zgraph_area(lambda x, y: 0.5 * x * y, square)
    a2 = zgraph_area(lambda x, y: -0.5 * x * y, square)
    assert a1 == pytest.approx(0.5, abs=1e-10)
    assert a2 == pytest.approx(0.5, abs=1e-10)


def test_zgraph_area_of_flat_disk():
    disk = VRegion(-1.0, 1.0,
                   lambda x: -np.sqrt(np.clip(1.0 - np.asarray(x) ** 2, 0.0, None)),
                   lambda x: np.sqrt(np.clip(1.0 - np.asarray(x) ** 2, 0.0, None)))
    area = zgraph_area(lambda x, y: 0.0 * x, disk)
    assert area == pytest.approx(math.pi / 3.0, rel=1e-3)
