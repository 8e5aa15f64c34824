"""Intrinsic graphs over the vertical plane and their sub-Riemannian areas.

A scalar field f on V0 = {y = 0} (coordinates (x, z)) determines the graph
{ (x, 0, z) * (0, f(x,z), 0) }.  Its area over a region W is

    area = int_W sqrt(1 + (grad_f f)^2) dmu,   grad_f f = d_x f - f d_z f,

and the intrinsic Dirichlet energy replaces sqrt(1 + s^2) by s^2 / 2.  The
same machinery covers z-graphs z = phi(x, y), whose perimeter density is
|(phi_x + y/2, phi_y - x/2)|.

Derivatives are central finite differences.  The step shrinks per point (by
halving, floor 1e-9 * scale) so the stencil never leaves the integration
region: region boundaries are typically fold curves of the field, and a fixed
step would smear the derivative jump over an O(h) band.  Stencils are always
central; a point with no room for any central stencil raises DomainError.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .quadrature import DEFAULT_2D, QuadConfig, VRegion, integrate_region

__all__ = [
    "DomainError",
    "ScalarField",
    "PlanarCurve",
    "LiftedCurve",
    "intrinsic_gradient",
    "graph_area",
    "dirichlet_energy",
    "characteristic_curve",
    "horizontal_lift",
    "zgraph_area",
]


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite differences with shrink-to-fit central stencils

_H_REL = 1e-4
_H_FLOOR_REL = 1e-9


def _fit_step(
    inside: Callable[[np.ndarray, np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    h0: float,
    hmin: float,
    axis: int,
) -> np.ndarray:
    """Largest per-point halving of h0 keeping a +-h central stencil inside."""
    h = np.full(np.shape(a), h0, dtype=float)

    def ok(hh: np.ndarray) -> np.ndarray:
        if axis == 0:
            return inside(a + hh, b) & inside(a - hh, b)
        return inside(a, b + hh) & inside(a, b - hh)

    good = ok(h)
    for _ in range(64):
        if good.all():
            return h
        shrink = ~good & (h > hmin)
        if not shrink.any():
            break
        h = np.where(shrink, 0.5 * h, h)
        good = ok(h)
    if not good.all():
        raise DomainError("boundary stencil")
    return h


def _central_partials(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    y: np.ndarray,
    h0: float,
    inside: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hmin = h0 * (_H_FLOOR_REL / _H_REL)
    if inside is None:
        hx = np.full(x.shape, h0)
        hy = np.full(y.shape, h0)
    else:
        hx = _fit_step(inside, x, y, h0, hmin, axis=0)
        hy = _fit_step(inside, x, y, h0, hmin, axis=1)
    fx = (f(x + hx, y) - f(x - hx, y)) / (2.0 * hx)
    fy = (f(x, y + hy) - f(x, y - hy)) / (2.0 * hy)
    return fx, fy


# ---------------------------------------------------------------------------
# scalar fields


@dataclass
class ScalarField:
    """Scalar field on a rectangular window of V0, closed form or gridded.

    Exactly one of fn / grid is set.  entire=True marks fields defined on all
    of V0 (evaluation outside the window is then allowed); region optionally
    restricts the domain to a vertically convex subset of the window.
    """

    window: tuple[float, float, float, float]
    fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    grid: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None
    region: Optional[VRegion] = None
    entire: bool = False
    name: str = ""

    def __post_init__(self):
        if (self.fn is None) == (self.grid is None):
            raise ValueError("exactly one of fn/grid must be given")
        x0, x1, z0, z1 = self.window
        if not (x1 > x0 and z1 > z0):
            raise ValueError("empty window")
        if self.grid is not None:
            xs, zs, vals = self.grid
            if vals.shape != (len(xs), len(zs)):
                raise ValueError("grid shape mismatch")

    @staticmethod
    def from_function(fn, window, region=None, entire=False, name="") -> "ScalarField":
        return ScalarField(window=tuple(map(float, window)), fn=fn,
                           region=region, entire=entire, name=name)

    @staticmethod
    def from_samples(xs, zs, values, region=None, name="") -> "ScalarField":
        xs = np.asarray(xs, dtype=float)
        zs = np.asarray(zs, dtype=float)
        values = np.asarray(values, dtype=float)
        window = (float(xs[0]), float(xs[-1]), float(zs[0]), float(zs[-1]))
        return ScalarField(window=window, grid=(xs, zs, values),
                           region=region, name=name)

    def default_region(self) -> VRegion:
        if self.region is not None:
            return self.region
        x0, x1, z0, z1 = self.window
        return VRegion.rect(x0, x1, z0, z1)

    def domain_contains(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        if self.entire:
            return np.ones(np.broadcast_shapes(np.shape(x), np.shape(z)), dtype=bool)
        x0, x1, z0, z1 = self.window
        ok = (x >= x0) & (x <= x1) & (z >= z0) & (z <= z1)
        if self.region is not None:
            ok &= self.region.contains(x, z)
        return ok

    def diagonal(self) -> float:
        x0, x1, z0, z1 = self.window
        return math.hypot(x1 - x0, z1 - z0)

    def __call__(self, x, z) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.fn is not None:
            return np.asarray(self.fn(x, z), dtype=float)
        return self._bilinear(x, z)

    def _bilinear(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        xs, zs, vals = self.grid
        i = np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2)
        j = np.clip(np.searchsorted(zs, z) - 1, 0, len(zs) - 2)
        tx = np.clip((x - xs[i]) / (xs[i + 1] - xs[i]), 0.0, 1.0)
        tz = np.clip((z - zs[j]) / (zs[j + 1] - zs[j]), 0.0, 1.0)
        v00 = vals[i, j]
        v10 = vals[i + 1, j]
        v01 = vals[i, j + 1]
        v11 = vals[i + 1, j + 1]
        return (
            v00 * (1 - tx) * (1 - tz)
            + v10 * tx * (1 - tz)
            + v01 * (1 - tx) * tz
            + v11 * tx * tz
        )

    def sampled(self, nx: int, nz: int) -> "ScalarField":
        """Gridded copy on an nx-by-nz lattice over the window."""
        x0, x1, z0, z1 = self.window
        xs = np.linspace(x0, x1, nx)
        zs = np.linspace(z0, z1, nz)
        vals = self(*np.meshgrid(xs, zs, indexing="ij"))
        return ScalarField.from_samples(xs, zs, vals, region=self.region,
                                        name=self.name + ":sampled")


def intrinsic_gradient(
    field: ScalarField,
    x,
    z,
    h: Optional[float] = None,
    clip: Optional[VRegion] = None,
):
    """grad_f f = d_x f - f d_z f by central differences.

    clip (default: the field's domain) bounds the stencil; per-point steps
    shrink by halving so the stencil stays inside it.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    scalar_input = x.ndim == 0 and z.ndim == 0
    x, z = np.atleast_1d(x), np.atleast_1d(z)
    h0 = h if h is not None else _H_REL * field.diagonal()
    if field.entire and clip is None:
        inside = None
    elif clip is None:
        inside = field.domain_contains
    else:
        inside = lambda a, b: clip.contains(a, b) & field.domain_contains(a, b)
    fx, fz = _central_partials(field.__call__, x, z, h0, inside)
    out = fx - field(x, z) * fz
    return float(out[0]) if scalar_input else out


# ---------------------------------------------------------------------------
# area and energy


def _resolve_region(field: ScalarField, region: Optional[VRegion]) -> VRegion:
    return region if region is not None else field.default_region()


def graph_area(
    field: ScalarField,
    region: Optional[VRegion] = None,
    cfg: QuadConfig = DEFAULT_2D,
) -> float:
    """Sub-Riemannian area of the intrinsic graph of f over the region."""
    reg = _resolve_region(field, region)

    def integrand(x, z):
        g = intrinsic_gradient(field, x, z, clip=reg)
        return np.sqrt(1.0 + g * g)

    return integrate_region(integrand, reg, cfg)


def dirichlet_energy(
    field: ScalarField,
    region: Optional[VRegion] = None,
    cfg: QuadConfig = DEFAULT_2D,
) -> float:
    """Intrinsic Dirichlet energy (1/2) int (grad_f f)^2."""
    reg = _resolve_region(field, region)

    def integrand(x, z):
        g = intrinsic_gradient(field, x, z, clip=reg)
        return 0.5 * g * g

    return integrate_region(integrand, reg, cfg)


# ---------------------------------------------------------------------------
# characteristic curves


def characteristic_curve(
    field: ScalarField,
    start: tuple[float, float],
    x_end: float,
    step: float = 1e-3,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Integral curve of g'(x) = -f(x, g(x)) by fixed-step RK4.

    Returns (xs, gs, meta).  The trace truncates at the domain boundary;
    leaving the domain on the very first step is an error.  meta flags
    whether local Lipschitz behaviour of f in z supports uniqueness.
    """
    x0, g0 = float(start[0]), float(start[1])
    x_end = float(x_end)
    if not field.domain_contains(np.array(x0), np.array(g0)):
        raise DomainError("characteristic start outside domain")

    meta = {"uniqueness_guaranteed": True, "truncated": False}
    hprobe = _H_REL * field.diagonal()
    try:
        s_big = _one_sided_zslope(field, x0, g0, hprobe)
        s_small = _one_sided_zslope(field, x0, g0, hprobe / 16.0)
        if not np.isfinite(s_small) or s_small > 2.5 * s_big + 1e-9:
            meta["uniqueness_guaranteed"] = False
    except Exception:
        meta["uniqueness_guaranteed"] = False

    direction = 1.0 if x_end >= x0 else -1.0
    n_steps = max(1, int(math.ceil(abs(x_end - x0) / step)))
    xs = [x0]
    gs = [g0]
    x, g = x0, g0
    rhs = lambda xx, gg: -float(field(np.array(xx), np.array(gg)))
    for k in range(n_steps):
        hstep = min(step, abs(x_end - x)) * direction
        if hstep == 0.0:
            break
        k1 = rhs(x, g)
        k2 = rhs(x + hstep / 2, g + hstep * k1 / 2)
        k3 = rhs(x + hstep / 2, g + hstep * k2 / 2)
        k4 = rhs(x + hstep, g + hstep * k3)
        g_next = g + hstep * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        x_next = x + hstep
        if not field.domain_contains(np.array(x_next), np.array(g_next)):
            if k == 0:
                raise DomainError("characteristic leaves domain immediately")
            meta["truncated"] = True
            break
        x, g = x_next, g_next
        xs.append(x)
        gs.append(g)
    return np.array(xs), np.array(gs), meta


def _one_sided_zslope(field: ScalarField, x: float, z: float, h: float) -> float:
    f0 = float(field(np.array(x), np.array(z)))
    fp = float(field(np.array(x), np.array(z + h)))
    fm = float(field(np.array(x), np.array(z - h)))
    return max(abs(fp - f0), abs(f0 - fm)) / h


# ---------------------------------------------------------------------------
# curves and lifts


@dataclass(frozen=True)
class PlanarCurve:
    """Polyline in the plane A = {z = 0}, stored as an (N, 2) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValueError("need an (N, 2) array, N >= 2")
        object.__setattr__(self, "points", pts)

    @staticmethod
    def from_function(fn: Callable[[np.ndarray], tuple], t0: float, t1: float, n: int) -> "PlanarCurve":
        t = np.linspace(float(t0), float(t1), int(n))
        x, y = fn(t)
        return PlanarCurve(np.stack([x, y], axis=-1))


@dataclass(frozen=True)
class LiftedCurve:
    """Horizontal polyline in the group with a declared horizontality budget."""

    points: np.ndarray
    tolerance: float = 1e-12

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
            raise ValueError("need an (N, 3) array, N >= 2")
        object.__setattr__(self, "points", pts)
        res = self.residual()
        if res > self.tolerance:
            raise ValueError(f"lift residual {res:.3e} exceeds tolerance")

    def residual(self) -> float:
        from .core import chord_offset_arr

        p = self.points
        if len(p) < 2:
            return 0.0
        return float(np.max(np.abs(chord_offset_arr(p[:-1], p[1:]))))


def horizontal_lift(curve: PlanarCurve, z0: float = 0.0, tolerance: float = 1e-12) -> LiftedCurve:
    """Lift a planar polyline edge by edge: dz = (x dy - y dx) / 2.

    Each chord of the result is horizontal by construction; around a closed
    loop the lift climbs by the signed enclosed area.
    """
    xy = curve.points
    x, y = xy[:, 0], xy[:, 1]
    dz = 0.5 * (x[:-1] * np.diff(y) - y[:-1] * np.diff(x))
    z = float(z0) + np.concatenate([[0.0], np.cumsum(dz)])
    return LiftedCurve(np.stack([x, y, z], axis=-1), tolerance=tolerance)


# ---------------------------------------------------------------------------
# z-graphs


def zgraph_area(
    phi: Callable[[np.ndarray, np.ndarray], np.ndarray],
    region: VRegion,
    cfg: QuadConfig = DEFAULT_2D,
    clip_stencil: bool = True,
) -> float:
    """Perimeter of the z-graph z = phi(x, y) over a planar region.

    Integrand |(phi_x + y/2, phi_y - x/2)|; partials by central differences
    with the same shrink-to-fit stencil policy as intrinsic graphs.
    """
    h0 = _H_REL * region.diagonal()
    inside = region.contains if clip_stencil else None

    def integrand(x, y):
        px, py = _central_partials(phi, x, y, h0, inside)
        return np.hypot(px + 0.5 * y, py - 0.5 * x)

    return integrate_region(integrand, region, cfg)
