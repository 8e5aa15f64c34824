"""Surface families built from horizontal rulings.

Three constructions share this module:

* **Entire ruled graphs** (`RuledEntireGraph`): intrinsic graphs over the
  whole vertical plane whose rulings are horizontal lines through the y
  axis.  `scaling_limit` classifies the blow-down of such a graph as a
  rotated broken plane with opening parameter ``u`` and rotation ``theta``.

* **Equal-area spanning family** (`sigma_rho_surface`): ruled surfaces
  joining two fixed boundary lines by horizontal chords, parametrized by an
  increasing reparametrization ``rho``.  Every member spans the same
  boundary pair and `sigma_rho_area` shows the area depends only on the
  endpoint data, which is what makes the minimizing filling non-unique.

* **Competitor surfaces** (`build_competitor`): two spanning surfaces for
  the truncated broken-plane boundary, swept by horizontal segments either
  through a fixed interior segment (kind ``"harmonic"``) or along the
  horizontal lift of a hyperbola arc (kind ``"minimal"``).
  `competitor_compare` doubles the half-surfaces by the flip
  (x, y, z) -> (-x, y, -z) and reports their area/energy against the
  broken-plane patch over the same vertical window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .core import chord_offset_arr
from .quadrature import (DEFAULT_1D, QuadConfig, VRegion, integrate_1d,
                         integrate_region)
from .strips import Profile, ProfileError, _solve_height
from .surfaces import RuledSurface
from .variation import g_primitive

__all__ = [
    "RuledEntireGraph",
    "ScalingLimitReport",
    "tail_slope_limits",
    "broken_plane_graph_value",
    "scaling_limit",
    "sigma_rho_surface",
    "sigma_rho_membership",
    "MembershipSlab",
    "chord_height",
    "sigma_rho_area",
    "sigma_rho_area_quadrature",
    "ChordObstructionReport",
    "chord_obstruction_check",
    "CompetitorSurface",
    "build_competitor",
    "hyperbola_constants",
    "hyperbola_y",
    "hyperbola_slope",
    "hyperbola_intercept",
    "hyperbola_lift_z",
    "tangent_bisection_residual",
    "patch_area",
    "patch_energy",
    "wedge_area",
    "broken_plane_area",
    "broken_plane_energy",
    "CompareReport",
    "competitor_compare",
]


# ---------------------------------------------------------------------------
# entire ruled graphs and their blow-down


_BAND_PROBES = np.linspace(-64.0, 64.0, 257)


@dataclass(frozen=True)
class RuledEntireGraph:
    """Entire intrinsic graph ruled by horizontal lines through the y axis.

    The ruling at height ``z`` is ``t -> (t, t*s, z)`` with slope ``s`` in
    the band ``[sigma_minus(z), sigma_plus(z)]``.  Both band edges must be
    non-increasing so that distinct rulings never cross; with a single
    profile the band is degenerate and the graph is the closure of the
    rulings' union.
    """

    sigma_plus: Profile
    sigma_minus: Optional[Profile] = None
    name: str = ""

    def __post_init__(self):
        z = _BAND_PROBES
        hi = np.asarray(self.sigma_plus(z), dtype=float)
        lo = np.asarray(self.band_lower(z), dtype=float)
        for vals, tag in ((hi, "sigma_plus"), (lo, "sigma_minus")):
            if np.any(np.diff(vals) > 1e-12):
                raise ProfileError(f"{tag} must be non-increasing")
        if np.any(lo > hi + 1e-12):
            raise ProfileError("sigma_minus must stay below sigma_plus")

    @property
    def band_lower(self) -> Profile:
        return self.sigma_minus if self.sigma_minus is not None else self.sigma_plus

    def graph_value(self, x, zprime):
        """Graph function y = f(x, z') over the vertical plane.

        The ruling height z* solves z - sigma_plus(z) x^2 / 2 = z'; the
        realized slope is recovered as 2 (z* - z') / x^2, which stays
        correct across jumps of the profile (there the solver lands on the
        jump height and the ratio interpolates through the slope band).
        """
        x = np.asarray(x, dtype=float)
        zp = np.asarray(zprime, dtype=float)
        x, zp = np.broadcast_arrays(x, zp)
        z_star = _solve_height(self.sigma_plus, x, zp)
        x2 = x * x
        safe = np.where(x2 > 0.0, x2, 1.0)
        slope = np.where(x2 > 0.0, 2.0 * (z_star - zp) / safe,
                         np.asarray(self.sigma_plus(z_star), dtype=float))
        out = x * slope
        return out if out.ndim else float(out)

    def dilated_value(self, t: float, x, zprime):
        """Graph function of the rescaled graph: f_t(x, z') = f(tx, t^2 z')/t."""
        t = float(t)
        if not t > 0:
            raise ValueError("dilation parameter must be positive")
        x = np.asarray(x, dtype=float)
        zp = np.asarray(zprime, dtype=float)
        return self.graph_value(t * x, t * t * zp) / t

    def membership_offset(self, points: np.ndarray) -> np.ndarray:
        """Signed y offset from the slope band at each point's own height."""
        pts = np.asarray(points, dtype=float)
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        sa = x * np.asarray(self.sigma_plus(z), dtype=float)
        sb = x * np.asarray(self.band_lower(z), dtype=float)
        lo = np.minimum(sa, sb)
        hi = np.maximum(sa, sb)
        return np.where(y > hi, y - hi, np.where(y < lo, y - lo, 0.0))


def tail_slope_limits(profile: Profile, window: float = 1.0e3) -> tuple[float, float]:
    """Estimate the slope limits (at -inf, at +inf) from tail samples.

    Richardson extrapolation in 1/z on the outer half of the window is exact
    for ``c + O(1/z)`` tails.  A tail that keeps drifting between the two
    extrapolation scales is reported as the appropriate infinity (the
    profile is non-increasing, so the direction is determined by the sign
    of the drift).
    """
    w = float(window)
    if not w > 0:
        raise ValueError("window must be positive")
    out = []
    for sgn in (-1.0, 1.0):
        z = sgn * w
        v4 = float(profile(z / 4.0))
        v2 = float(profile(z / 2.0))
        v1 = float(profile(z))
        rich_outer = 2.0 * v1 - v2
        rich_inner = 2.0 * v2 - v4
        if abs(rich_outer - rich_inner) > 1e-2 * (1.0 + abs(rich_inner)):
            out.append(math.inf if v1 > v2 else -math.inf)
        else:
            out.append(rich_outer)
    return out[0], out[1]


def broken_plane_graph_value(slope_neg, slope_pos, x, zprime):
    """Entire-graph function with constant ruling slopes away from a fan.

    The ruling slope is ``slope_neg`` for heights below zero and
    ``slope_pos`` above; the parabolic fan in between interpolates with
    slope ``-2 z'/x^2``.  This is the pointwise limit of every blow-down of
    an entire ruled graph whose profile has these two tail limits.
    """
    big, small = float(slope_neg), float(slope_pos)
    if not (math.isfinite(big) and math.isfinite(small)):
        raise ValueError("infinite limit slopes have no graph realization")
    if small > big + 1e-12:
        raise ValueError("need slope_neg >= slope_pos")
    x = np.asarray(x, dtype=float)
    zp = np.asarray(zprime, dtype=float)
    x, zp = np.broadcast_arrays(x, zp)
    x2 = x * x
    z_upper = zp + 0.5 * small * x2
    z_lower = zp + 0.5 * big * x2
    fan = np.divide(-2.0 * zp, x2, out=np.zeros_like(zp), where=x2 > 0.0)
    slope = np.where(z_upper > 0.0, small, np.where(z_lower < 0.0, big, fan))
    out = x * slope
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ScalingLimitReport:
    """Classification of the blow-down of an entire ruled graph.

    ``slope_neg_limit`` / ``slope_pos_limit`` are the estimated profile
    limits at -inf / +inf.  The limit surface is the broken plane with
    opening ``u`` rotated by ``theta`` about the z axis; ``errors`` are the
    max probe-point deviations of the rescaled graph from the limit graph,
    one entry per element of ``t_grid``.
    """

    slope_neg_limit: float
    slope_pos_limit: float
    theta: float
    u: float
    t_grid: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def kind(self) -> str:
        if not math.isfinite(self.u):
            return "vertical-plane-limit"
        return "plane" if self.u == 0.0 else "broken-plane"

    def converged(self, drop: float = 0.75, floor: float = 1e-9) -> bool:
        """Errors decrease along the t grid (at least geometrically)."""
        errs = self.errors
        if len(errs) < 2:
            return bool(errs) and errs[-1] < floor
        return all(b <= drop * a + floor for a, b in zip(errs, errs[1:]))


_DEFAULT_PROBES = tuple(
    (x, z)
    for x in (-0.8, -0.45, 0.45, 0.8)
    for z in (-0.8, -0.35, 0.35, 0.8)
)


def scaling_limit(graph: RuledEntireGraph,
                  t_grid: Sequence[float] = (2.0, 4.0, 8.0, 16.0),
                  probes: Optional[Sequence[tuple[float, float]]] = None,
                  window: float = 1.0e3) -> ScalingLimitReport:
    """Classify the blow-down of an entire ruled graph.

    Tail limits of the upper profile are estimated at the edge of
    ``window``; the resulting rotation/opening pair ``(theta, u)`` follows
    from averaging/differencing the tail angles.  When both limits are
    finite the rescaled graph is evaluated on the probe points and compared
    against the limit graph, giving one max-error entry per ``t``.
    """
    ts = tuple(float(t) for t in t_grid)
    if not ts or any(t <= 0 for t in ts) or list(ts) != sorted(ts):
        raise ValueError("t grid must be positive and increasing")
    pts = np.asarray(probes if probes is not None else _DEFAULT_PROBES,
                     dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("probes must be (x, z') pairs")
    reach = 2.0 * max(ts) ** 2 * float(np.max(np.abs(pts[:, 1])))
    if reach > window:
        raise ValueError(
            "window too small for requested t: dilations sample heights up "
            f"to about {reach:.3g} but only |z| <= {window:.3g} is trusted")

    slope_neg, slope_pos = tail_slope_limits(graph.sigma_plus, window)
    angle_neg, angle_pos = math.atan(slope_neg), math.atan(slope_pos)
    theta = (0.5 * (angle_neg + angle_pos)) % math.pi
    if math.isinf(slope_neg) and math.isinf(slope_pos):
        u = math.inf
    elif (math.isfinite(slope_neg) and math.isfinite(slope_pos)
          and abs(slope_neg - slope_pos) < 1e-6):
        u = 0.0
    else:
        u = math.tan(0.5 * (angle_neg - angle_pos))

    errors: list[float] = []
    if math.isfinite(slope_neg) and math.isfinite(slope_pos):
        ref = broken_plane_graph_value(slope_neg, slope_pos,
                                       pts[:, 0], pts[:, 1])
        for t in ts:
            ft = graph.dilated_value(t, pts[:, 0], pts[:, 1])
            errors.append(float(np.max(np.abs(ft - ref))))
    return ScalingLimitReport(slope_neg, slope_pos, theta, u, ts,
                              tuple(errors))


# ---------------------------------------------------------------------------
# the equal-area spanning family


def _check_increasing(rho: Profile, a: float, b: float) -> None:
    z = np.linspace(a, b, 513)
    v = np.asarray(rho(z), dtype=float)
    if np.any(np.diff(v) <= 0.0):
        raise ProfileError("rho must be strictly increasing on the window")


def _ruling_points(rho: Profile, z, x) -> np.ndarray:
    """Points of the left-to-right chord at parameter z, abscissa x."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    z, x = np.broadcast_arrays(z, x)
    r = np.asarray(rho(z), dtype=float)
    y = 2.0 * z - (x + 1.0) * (z + r)
    height = z + 0.5 * (x + 1.0) * (r - z)
    return np.stack([x, y, height], axis=-1)


def sigma_rho_surface(rho: Profile, window: tuple[float, float]) -> RuledSurface:
    """Ruled surface joining the two fixed boundary lines by straight chords.

    The left boundary line is ``z -> (-1, 2z, z)`` and the right one is
    ``w -> (1, -2w, w)``.  The chord from parameter ``z`` on the left to
    ``rho(z)`` on the right is horizontal for *every* increasing
    reparametrization ``rho``, so all members of the family span the same
    boundary pair.
    """
    a, b = float(window[0]), float(window[1])
    if not b > a:
        raise ValueError("window must satisfy a < b")
    _check_increasing(rho, a, b)

    def left(w):
        w = np.asarray(w, dtype=float)
        return np.stack([-np.ones_like(w), 2.0 * w, w], axis=-1)

    def right(w):
        w = np.asarray(w, dtype=float)
        r = np.asarray(rho(w), dtype=float) * np.ones_like(w)
        return np.stack([np.ones_like(w), -2.0 * r, r], axis=-1)

    def dleft(w):
        w = np.asarray(w, dtype=float)
        one = np.ones_like(w)
        return np.stack([np.zeros_like(w), 2.0 * one, one], axis=-1)

    def dright(w):
        w = np.asarray(w, dtype=float)
        dr = np.asarray(rho.derivative(w), dtype=float) * np.ones_like(w)
        return np.stack([np.zeros_like(w), -2.0 * dr, dr], axis=-1)

    knots = tuple(float(k) for k in getattr(rho, "w", ()) if a < k < b)
    return RuledSurface(left, right, (a, b), knots=knots, da=dleft,
                        db=dright, name="sigma-rho")


@dataclass(frozen=True)
class MembershipSlab:
    """Adapter exposing a membership offset over the slab |x| <= x_max.

    Suitable for the line-crossing census: the offset is the signed y
    distance to the surface sheet above/below the query point.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    x_max: float = 1.0
    name: str = ""

    def membership_offset(self, points: np.ndarray) -> np.ndarray:
        return self.fn(points)


def sigma_rho_membership(rho: Profile, window: tuple[float, float]) -> MembershipSlab:
    """Membership offset for the spanning surface, extended monotonically.

    Inside the swept height range the offset is the signed y distance to
    the chord through the query point's height; beyond the range the sweep
    parameter is clamped, which extends the surface by translates of its
    first/last chord.  The extension is still swept monotonically, so
    crossing counts against it remain meaningful for the census.
    """
    a, b = float(window[0]), float(window[1])
    if not b > a:
        raise ValueError("window must satisfy a < b")
    _check_increasing(rho, a, b)

    def solve(x, z):
        # invert (1-s) w + s rho(w) = z for the sweep parameter w, s=(x+1)/2
        s = np.clip(0.5 * (x + 1.0), 0.0, 1.0)
        lo = np.full(np.shape(z), a, dtype=float)
        hi = np.full(np.shape(z), b, dtype=float)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            h = (1.0 - s) * mid + s * np.asarray(rho(mid), dtype=float)
            take = h < z
            lo = np.where(take, mid, lo)
            hi = np.where(take, hi, mid)
        return 0.5 * (lo + hi)

    def offset(points):
        pts = np.asarray(points, dtype=float)
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        w = solve(x, z)
        r = np.asarray(rho(w), dtype=float)
        y_surf = 2.0 * w - (x + 1.0) * (w + r)
        return y - y_surf

    return MembershipSlab(offset, x_max=1.0, name="sigma-rho")


def chord_height(z_left, z_right, x):
    """Intrinsic height z - xy/2 along a left-to-right boundary chord.

    The chord runs from ``(-1, 2 z_left, z_left)`` to
    ``(1, -2 z_right, z_right)``; its intrinsic height at abscissa ``x`` is
    ``z_left (x-1)^2 / 2 + z_right (x+1)^2 / 2``.  Surjectivity of this
    family in the sweep parameter is what makes the spanning surfaces cover
    the full slab footprint.
    """
    z1 = np.asarray(z_left, dtype=float)
    z2 = np.asarray(z_right, dtype=float)
    x = np.asarray(x, dtype=float)
    out = 0.5 * z1 * (x - 1.0) ** 2 + 0.5 * z2 * (x + 1.0) ** 2
    return out if out.ndim else float(out)


def sigma_rho_area(rho: Profile, a: float, b: float) -> float:
    """Closed-form spanning area over sweep window [a, b].

    The ruled-area element integrates in the combined endpoint coordinate
    m = z + rho(z), so the area is (4/3) [G(b + rho(b)) - G(a + rho(a))]
    with G the antiderivative of sqrt(1 + m^2).  It depends only on the
    endpoint data — every reparametrization with the same endpoints has the
    same area.
    """
    a, b = float(a), float(b)
    if a > b:
        raise ValueError("need a <= b")
    if a == b:
        return 0.0
    _check_increasing(rho, a, b)
    m0 = a + float(rho(a))
    m1 = b + float(rho(b))
    return (4.0 / 3.0) * (g_primitive(m1) - g_primitive(m0))


def sigma_rho_area_quadrature(rho: Profile, a: float, b: float,
                              cfg: QuadConfig = DEFAULT_1D) -> float:
    """Same spanning area by direct quadrature of the ruled area element."""
    a, b = float(a), float(b)
    if a > b:
        raise ValueError("need a <= b")
    if a == b:
        return 0.0
    _check_increasing(rho, a, b)

    def integrand(z):
        r = np.asarray(rho(z), dtype=float)
        dr = np.asarray(rho.derivative(z), dtype=float)
        return (4.0 / 3.0) * (1.0 + dr) * np.sqrt(1.0 + (z + r) ** 2)

    knots = tuple(float(k) for k in getattr(rho, "w", ()) if a < k < b)
    return integrate_1d(integrand, a, b, cfg=cfg, knots=knots)


@dataclass(frozen=True)
class ChordObstructionReport:
    """Result of the no-interior-horizontal-chord check between two rulings."""

    ok: bool
    min_abs_offset: float
    corner_offset: float
    n_pairs: int


def chord_obstruction_check(rho: Profile, z_left: float, z_right: float,
                            n: int = 10_000, seed: int = 0,
                            pad: float = 1e-3) -> ChordObstructionReport:
    """Check that no chord between interior points of two rulings is horizontal.

    Chords between two distinct rulings of the spanning surface are
    horizontal only at the two corner pairs (x, x') = (-1, 1) and (1, -1);
    a horizontal chord between interior points would let a sweep jump
    between rulings.  The check samples interior abscissa pairs and records
    the smallest |offset|, plus the corner offsets which must vanish.
    """
    z1, z2 = float(z_left), float(z_right)
    if z1 == z2:
        raise ValueError("need two distinct ruling parameters")
    if n < 1:
        raise ValueError("need at least one sample pair")
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-1.0 + pad, 1.0 - pad, size=n)
    x2 = rng.uniform(-1.0 + pad, 1.0 - pad, size=n)
    p = _ruling_points(rho, np.full(n, z1), x1)
    q = _ruling_points(rho, np.full(n, z2), x2)
    off = np.abs(chord_offset_arr(p, q))
    corner = max(
        abs(float(chord_offset_arr(_ruling_points(rho, z1, -1.0),
                                   _ruling_points(rho, z2, 1.0)))),
        abs(float(chord_offset_arr(_ruling_points(rho, z1, 1.0),
                                   _ruling_points(rho, z2, -1.0)))),
    )
    return ChordObstructionReport(ok=bool(off.min() > 0.0),
                                  min_abs_offset=float(off.min()),
                                  corner_offset=corner, n_pairs=int(n))


# ---------------------------------------------------------------------------
# competitor surfaces over the truncated broken plane


def hyperbola_constants(u: float) -> tuple[float, float]:
    """Semi-axis data (A, B^2) of the guide hyperbola with foci (-1, +-u).

    The lower branch of y^2/A^2 - (x+1)^2/B^2 = 1 with A = sqrt(u^2+1) - 1
    and B^2 = u^2 - A^2 = 2A passes through (1, -u) and has its foci at
    (-1, +-u).
    """
    if not u > 0:
        raise ValueError("u must be positive")
    a_axis = math.hypot(u, 1.0) - 1.0
    return a_axis, u * u - a_axis * a_axis


def hyperbola_y(u: float, x) -> np.ndarray:
    """Lower-branch height of the guide hyperbola at abscissa x."""
    a_axis, b2 = hyperbola_constants(u)
    x = np.asarray(x, dtype=float)
    out = -a_axis * np.sqrt(1.0 + (x + 1.0) ** 2 / b2)
    return out if out.ndim else float(out)


def hyperbola_slope(u: float, x) -> np.ndarray:
    """dy/dx of the lower branch of the guide hyperbola."""
    a_axis, b2 = hyperbola_constants(u)
    x = np.asarray(x, dtype=float)
    out = -a_axis * (x + 1.0) / (b2 * np.sqrt(1.0 + (x + 1.0) ** 2 / b2))
    return out if out.ndim else float(out)


def hyperbola_intercept(u: float) -> float:
    """y-intercept a < -u/2 of the guide hyperbola on the x = 0 line."""
    a_axis, b2 = hyperbola_constants(u)
    return -a_axis * math.sqrt(1.0 / b2 + 1.0)


def hyperbola_lift_z(u: float, x) -> np.ndarray:
    """Height of the horizontal lift of the guide arc at abscissa x.

    The lift starts at height -a/2 over the y-intercept (0, a) and follows
    dz = (x dy - y dx)/2 along the arc; with w = x + 1 the integrand is
    (A/B)(B^2 + w)/(2 sqrt(B^2 + w^2)), whose antiderivative is
    (A/2)(B asinh(w/B) + sqrt(B^2 + w^2)/B).
    """
    a_axis, b2 = hyperbola_constants(u)
    b_axis = math.sqrt(b2)
    x = np.asarray(x, dtype=float)
    w = x + 1.0

    def anti(w):
        return 0.5 * a_axis * (b_axis * np.arcsinh(w / b_axis)
                               + np.sqrt(b2 + w * w) / b_axis)

    out = -0.5 * hyperbola_intercept(u) + anti(w) - anti(1.0)
    return out if out.ndim else float(out)


def tangent_bisection_residual(u: float, n: int = 100) -> float:
    """Max deviation from the focal-chord bisection property of the tangent.

    At each sampled arc point the unit tangent makes equal angles with the
    unit chords toward the two foci; the residual is the max difference of
    the two direction cosines.
    """
    x = np.linspace(0.02, 0.98, n)
    y = hyperbola_y(u, x)
    ty = hyperbola_slope(u, x)
    norm_t = np.hypot(1.0, ty)
    tx_u, ty_u = 1.0 / norm_t, ty / norm_t
    cu_x, cu_y = -1.0 - x, u - y
    cl_x, cl_y = -1.0 - x, -u - y
    cu_n = np.hypot(cu_x, cu_y)
    cl_n = np.hypot(cl_x, cl_y)
    dot_u = (tx_u * cu_x + ty_u * cu_y) / cu_n
    dot_l = (tx_u * cl_x + ty_u * cl_y) / cl_n
    return float(np.max(np.abs(dot_u - dot_l)))


@dataclass(frozen=True, eq=False)
class CompetitorSurface:
    """Half of a spanning surface for the truncated broken-plane boundary.

    The half-surface decomposes into a z-graph patch over the wedge
    triangle Omega = {|x| <= 1, -u <= y <= -u x} plus vertical ruled
    pieces; the full spanning surface is this half united with its image
    under (x, y, z) -> (-x, y, -z).

    ``apex_y`` is the y coordinate of the sweep apex (0, apex_y, -apex_y/2)
    on the x = 0 line; ``exit_height`` is the z value at which the sweep
    reaches the far corner (1, -u).  For the harmonic kind these are -u/2
    and u/2; for the minimal kind they are the hyperbola intercept ``a``
    and the lift endpoint height ``b``.
    """

    kind: str
    u: float
    apex_y: float
    exit_height: float
    spine: np.ndarray
    families: Mapping[str, np.ndarray]
    phi: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    slope: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    phi_y: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    region: VRegion = field(repr=False)
    regions: Mapping[str, VRegion] = field(repr=False, default=None)

    @property
    def apex(self) -> np.ndarray:
        return np.array([0.0, self.apex_y, -0.5 * self.apex_y])

    @property
    def far_point(self) -> np.ndarray:
        return np.array([1.0, -self.u, self.exit_height])

    def all_segments(self) -> np.ndarray:
        parts = [np.asarray(v, dtype=float) for v in self.families.values()]
        spine = np.stack([self.spine[:-1], self.spine[1:]], axis=1)
        return np.concatenate(parts + [spine], axis=0)

    def horizontality_residual(self) -> float:
        segs = self.all_segments()
        off = chord_offset_arr(segs[:, 0, :], segs[:, 1, :])
        return float(np.max(np.abs(off)))

    def nexus_slope_residual(self) -> float:
        """Max deviation of the mean upper/lower segment slope from the
        spine slope -u/2; the balance condition of the harmonic sweep."""
        if self.kind != "harmonic":
            raise ValueError("slope balance is a property of the harmonic "
                             "sweep; the minimal sweep satisfies an angle "
                             "bisection instead")
        up = self.families["upper"]
        lo = self.families["lower"]
        s_up = ((up[:, 1, 1] - up[:, 0, 1])
                / (up[:, 1, 0] - up[:, 0, 0]))
        s_lo = ((lo[:, 1, 1] - lo[:, 0, 1])
                / (lo[:, 1, 0] - lo[:, 0, 0]))
        return float(np.max(np.abs(0.5 * (s_up + s_lo) + 0.5 * self.u)))


def _fan_chords(apex_y: float, u: float, x):
    """Upper/lower footprint chords from the apex (0, apex_y) to (-1, +-u)."""
    x = np.asarray(x, dtype=float)
    upper = apex_y + (apex_y - u) * x
    lower = apex_y + (apex_y + u) * x
    return upper, lower


def _wedge_subregions(apex_y: float, u: float,
                      divider: Callable[[np.ndarray], np.ndarray]
                      ) -> dict[str, VRegion]:
    """Split the wedge triangle along the sweep seams into smooth pieces.

    ``divider`` is the footprint of the sweep guide for x >= 0 (the nexus
    line or the hyperbola arc); for x <= 0 the seams are the two fan
    chords.  The graph function is analytic on each piece, so quadrature
    keeps its full order there.
    """
    def upper_lo(x):
        x = np.asarray(x, dtype=float)
        chord = apex_y + (apex_y - u) * x
        return np.where(x <= 0.0, chord, divider(np.clip(x, 0.0, 1.0)))

    def lower_hi(x):
        x = np.asarray(x, dtype=float)
        chord = apex_y + (apex_y + u) * x
        return np.where(x <= 0.0, chord, divider(np.clip(x, 0.0, 1.0)))

    fan = VRegion(-1.0, 0.0,
                  lambda x: apex_y + (apex_y + u) * np.asarray(x, dtype=float),
                  lambda x: apex_y + (apex_y - u) * np.asarray(x, dtype=float))
    top = lambda x: -u * np.asarray(x, dtype=float)
    bottom = lambda x: np.full(np.shape(x), -float(u))
    return {
        "fan": fan,
        "upper": VRegion(-1.0, 1.0, upper_lo, top),
        "lower": VRegion(-1.0, 1.0, bottom, lower_hi),
    }


def _build_harmonic(u: float, resolution: int) -> CompetitorSurface:
    n = resolution
    t = np.linspace(0.0, 1.0, n)
    spine = np.stack([t, -0.5 * u * (1.0 + t), 0.25 * u * (1.0 + t)], axis=-1)
    apex_y = -0.5 * u

    upper_ends = np.stack([-np.ones(n), np.full(n, u), 0.5 * u * t], axis=-1)
    lower_ends = np.stack([-np.ones(n), np.full(n, -u), -0.5 * u * t], axis=-1)
    families = {
        "upper": np.stack([spine, upper_ends], axis=1),
        "lower": np.stack([spine, lower_ends], axis=1),
    }
    ys = np.linspace(-u, u, n)
    apex = np.array([0.0, apex_y, -0.5 * apex_y])
    fan_ends = np.stack([-np.ones(n), ys, np.zeros(n)], axis=-1)
    families["fan"] = np.stack([np.broadcast_to(apex, (n, 3)), fan_ends],
                               axis=1)
    zs = np.linspace(0.5 * u, 1.5 * u, n)
    wall_a = np.stack([-np.ones(n), np.full(n, u), zs], axis=-1)
    wall_b = np.stack([np.ones(n), np.full(n, -u), zs], axis=-1)
    families["wall"] = np.stack([wall_a, wall_b], axis=1)

    def branch(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        uf, lf = _fan_chords(apex_y, u, x)
        fan = (x <= 0.0) & (y <= uf) & (y >= lf)
        y_nexus = -0.5 * u * (1.0 + x)
        upper = ~fan & (((x <= 0.0) & (y > uf)) | ((x > 0.0) & (y >= y_nexus)))
        return x, y, fan, upper

    def phi(x, y):
        x, y, fan, upper = branch(x, y)
        z_fan = 0.25 * u * (1.0 + x)

        dx1 = x + 1.0
        safe = np.where(dx1 > 1e-300, dx1, 1.0)
        s_up = (y - u) / safe
        with np.errstate(divide="ignore", invalid="ignore"):
            t_up = u / np.where(-s_up - 0.5 * u > 0, -s_up - 0.5 * u, np.inf) - 1.0
        t_up = np.clip(t_up, 0.0, 1.0)
        z_up = 0.5 * u * t_up + 0.5 * (-(y - u) - u * dx1)

        s_lo = (y + u) / safe
        denom = u + 2.0 * s_lo
        t_lo = np.divide(u - 2.0 * s_lo, denom,
                         out=np.ones_like(denom), where=denom != 0.0)
        t_lo = np.clip(t_lo, 0.0, 1.0)
        z_lo = -0.5 * u * t_lo + 0.5 * (-(y + u) + u * dx1)

        out = np.where(fan, z_fan, np.where(upper, z_up, z_lo))
        return out if out.ndim else float(out)

    def slope(x, y):
        x, y, fan, upper = branch(x, y)
        safe_x = np.where(np.abs(x) > 1e-300, x, 1.0)
        s_fan = np.where(np.abs(x) > 1e-12, (y - apex_y) / safe_x, 0.0)
        dx1 = np.where(x + 1.0 > 1e-300, x + 1.0, 1.0)
        s_up = (y - u) / dx1
        s_lo = (y + u) / dx1
        out = np.where(fan, s_fan, np.where(upper, s_up, s_lo))
        return out if out.ndim else float(out)

    def phi_y(x, y):
        # differentiating the sweep parameter through the chord equations:
        # upper t = u/D - 1 with D = (u - y)/(x+1) - u/2, lower
        # t = (u - 2s)/(u + 2s) with s = (y + u)/(x+1); the fan height does
        # not depend on y.  On the nexus both sides give phi_y = x/2, so the
        # seam is a characteristic curve of the graph.
        x, y, fan, upper = branch(x, y)
        dx1 = np.where(x + 1.0 > 1e-300, x + 1.0, 1.0)
        d_up = (u - y) / dx1 - 0.5 * u
        d_up = np.where(np.abs(d_up) > 1e-300, d_up, 1.0)
        g_up = 0.5 * u * u / (d_up * d_up * dx1) - 0.5
        s_lo = (y + u) / dx1
        denom = u + 2.0 * s_lo
        denom = np.where(np.abs(denom) > 1e-300, denom, 1.0)
        g_lo = 2.0 * u * u / (denom * denom * dx1) - 0.5
        out = np.where(fan, 0.0, np.where(upper, g_up, g_lo))
        return out if out.ndim else float(out)

    region = VRegion(-1.0, 1.0,
                     lambda x: np.full(np.shape(x), -float(u)),
                     lambda x: -float(u) * np.asarray(x, dtype=float))
    regions = _wedge_subregions(apex_y, u,
                                lambda x: -0.5 * u * (1.0 + np.asarray(x)))
    return CompetitorSurface("harmonic", u, apex_y, 0.5 * u, spine, families,
                             phi, slope, phi_y, region, regions)


def _build_minimal(u: float, resolution: int,
                   n_lift: int = 4097) -> CompetitorSurface:
    apex_y = hyperbola_intercept(u)
    # dense spine sampling keeps the consecutive-chord horizontality offset
    # (the arc-to-chord sliver, ~|y''| dx^3 / 12) below the 1e-12 gate
    xg = np.linspace(0.0, 1.0, n_lift)
    yg = hyperbola_y(u, xg)
    z_table = hyperbola_lift_z(u, xg)
    b = float(hyperbola_lift_z(u, 1.0))

    spine = np.stack([xg, yg, z_table], axis=-1)
    n = resolution
    idx = np.linspace(0, n_lift - 1, n).round().astype(int)
    xs, ys, zs = xg[idx], yg[idx], z_table[idx]

    z_up = zs + 0.5 * (xs * (u - ys) - ys * (-1.0 - xs))
    z_lo = zs + 0.5 * (xs * (-u - ys) - ys * (-1.0 - xs))
    spine_samples = np.stack([xs, ys, zs], axis=-1)
    upper_ends = np.stack([-np.ones(n), np.full(n, u), z_up], axis=-1)
    lower_ends = np.stack([-np.ones(n), np.full(n, -u), z_lo], axis=-1)
    families = {
        "upper": np.stack([spine_samples, upper_ends], axis=1),
        "lower": np.stack([spine_samples, lower_ends], axis=1),
    }
    ysg = np.linspace(-u, u, n)
    apex = np.array([0.0, apex_y, -0.5 * apex_y])
    fan_ends = np.stack([-np.ones(n), ysg, np.zeros(n)], axis=-1)
    families["fan"] = np.stack([np.broadcast_to(apex, (n, 3)), fan_ends],
                               axis=1)
    zf = np.linspace(0.5 * u, b, n)
    flat_a = np.stack([-np.ones(n), np.full(n, -u), zf - u], axis=-1)
    flat_b = np.stack([np.ones(n), np.full(n, -u), zf], axis=-1)
    families["flat"] = np.stack([flat_a, flat_b], axis=1)
    zw = np.linspace(b, b + u, n)
    wall_a = np.stack([-np.ones(n), np.full(n, u), zw], axis=-1)
    wall_b = np.stack([np.ones(n), np.full(n, -u), zw], axis=-1)
    families["wall"] = np.stack([wall_a, wall_b], axis=1)

    def arc_param(x, y, corner_y):
        """Arc abscissa whose chord through (-1, corner_y) passes (x, y).

        The chord-side function is strictly monotone in the arc parameter
        (the arc slope stays below u in magnitude), so bisection applies;
        ``corner_y`` may be an array selecting the focus per point.
        """
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        dx1 = x + 1.0
        dy = y - corner_y
        sgn = np.where(corner_y > 0, 1.0, -1.0)
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            cross = (mid + 1.0) * dy - (hyperbola_y(u, mid) - corner_y) * dx1
            take = sgn * cross > 0.0
            lo = np.where(take, mid, lo)
            hi = np.where(take, hi, mid)
        return 0.5 * (lo + hi)

    def chord_z(x, y, xp):
        yp = hyperbola_y(u, xp)
        zp = hyperbola_lift_z(u, xp)
        return zp + 0.5 * (xp * (y - yp) - yp * (x - xp))

    def branch(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        uf, lf = _fan_chords(apex_y, u, x)
        fan = (x <= 0.0) & (y <= uf) & (y >= lf)
        arc = hyperbola_y(u, np.clip(x, 0.0, 1.0))
        upper = ~fan & (((x <= 0.0) & (y > uf)) | ((x > 0.0) & (y >= arc)))
        return x, y, fan, upper

    def phi(x, y):
        x, y, fan, upper = branch(x, y)
        z_fan = -0.5 * apex_y * (1.0 + x)
        corner = np.where(upper, u, -u)
        xp = arc_param(x, y, corner)
        out = np.where(fan, z_fan, chord_z(x, y, xp))
        return out if out.ndim else float(out)

    def slope(x, y):
        x, y, fan, upper = branch(x, y)
        safe_x = np.where(np.abs(x) > 1e-300, x, 1.0)
        s_fan = np.where(np.abs(x) > 1e-12, (y - apex_y) / safe_x, 0.0)
        dx1 = np.where(x + 1.0 > 1e-300, x + 1.0, 1.0)
        s_up = (y - u) / dx1
        s_lo = (y + u) / dx1
        out = np.where(fan, s_fan, np.where(upper, s_up, s_lo))
        return out if out.ndim else float(out)

    def phi_y(x, y):
        # implicit differentiation through the arc parameter t: with
        # Y the arc height, F(x, y, t) the chord height and
        # G = (t+1)(y - c) - (Y - c)(x+1) the collinearity constraint,
        # phi_y = F_y + F_t t_y = t/2 - (t+1) F_t / G_t where
        # F_t = ((t - x) Y' + (y - Y))/2 uses the lift ODE z' = (tY' - Y)/2.
        # On the arc F_t = 0, so phi_y = x/2 there: the lifted arc is a
        # characteristic curve of the graph.
        x, y, fan, upper = branch(x, y)
        corner = np.where(upper, u, -u)
        t = arc_param(x, y, corner)
        yt = hyperbola_y(u, t)
        dyt = hyperbola_slope(u, t)
        f_t = 0.5 * ((t - x) * dyt + (y - yt))
        g_t = (y - corner) - dyt * (x + 1.0)
        g_t = np.where(np.abs(g_t) > 1e-300, g_t, 1.0)
        out = np.where(fan, 0.0, 0.5 * t - (t + 1.0) * f_t / g_t)
        return out if out.ndim else float(out)

    region = VRegion(-1.0, 1.0,
                     lambda x: np.full(np.shape(x), -float(u)),
                     lambda x: -float(u) * np.asarray(x, dtype=float))
    regions = _wedge_subregions(apex_y, u, lambda x: hyperbola_y(u, x))
    return CompetitorSurface("minimal", u, apex_y, b, spine, families, phi,
                             slope, phi_y, region, regions)


def build_competitor(kind: str, u: float,
                     resolution: int = 257) -> CompetitorSurface:
    """Assemble one of the two spanning half-surfaces at a given sampling.

    ``kind`` selects the sweep guide: ``"harmonic"`` sweeps horizontal
    segments through a straight interior segment; ``"minimal"`` sweeps them
    along the horizontal lift of the guide hyperbola arc.  ``resolution``
    controls how many representative segments per family are stored.
    """
    if kind not in ("harmonic", "minimal"):
        raise ValueError("kind must be 'harmonic' or 'minimal'")
    if not u > 0:
        raise ValueError("u must be positive")
    if resolution < 9:
        raise ValueError("resolution too small")
    if kind == "harmonic":
        return _build_harmonic(float(u), int(resolution))
    return _build_minimal(float(u), int(resolution))


# ---------------------------------------------------------------------------
# area / energy bookkeeping over a vertical window


def wedge_area(u: float) -> float:
    """Area of the parabolic fan of the broken plane over |x| <= 1."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    return (u * math.sqrt(1.0 + u * u) + math.asinh(u)) / 3.0


def broken_plane_area(u: float, z_cap: float) -> float:
    """Area of the broken plane over |x| <= 1 within the slab |z| <= z_cap.

    The fan sits at spatial height z = 0, the upper half-plane occupies
    0 <= z <= z_cap and the lower one -z_cap <= z <= 0; each half-plane
    contributes a band of constant area element sqrt(1 + u^2) and footprint
    area 2 z_cap.
    """
    if z_cap < 0:
        raise ValueError("z_cap must be nonnegative")
    return wedge_area(u) + 4.0 * z_cap * math.sqrt(1.0 + u * u)


def broken_plane_energy(u: float, z_cap: float) -> float:
    """Dirichlet energy of the broken-plane graph within |z| <= z_cap.

    The fan contributes u^3/9 and each half-plane (constant ruling slope
    -+u) contributes u^2 z_cap / 1 over its band of footprint area 2 z_cap,
    i.e. u^2 z_cap each.
    """
    if z_cap < 0:
        raise ValueError("z_cap must be nonnegative")
    return u ** 3 / 9.0 + 2.0 * u * u * z_cap


_COMP_CFG = QuadConfig(rel_tol=1e-6, max_levels=10, n0=4)


def patch_area(comp: CompetitorSurface,
               cfg: QuadConfig = _COMP_CFG) -> float:
    """Area of the z-graph patch, integrated piecewise between the seams.

    Along each horizontal chord the graph satisfies
    phi_x + s phi_y = (s x - y)/2, so the area vector
    (phi_x + y/2, phi_y - x/2) is orthogonal to the chord direction (1, s)
    and its length is sqrt(1 + s^2) |phi_y - x/2|; only the closed-form
    y-partial is needed.
    """

    def integrand(x, y):
        s = comp.slope(x, y)
        return np.sqrt(1.0 + s * s) * np.abs(comp.phi_y(x, y) - 0.5 * x)

    return float(sum(integrate_region(integrand, reg, cfg)
                     for reg in comp.regions.values()))


def patch_energy(comp: CompetitorSurface,
                 cfg: QuadConfig = _COMP_CFG) -> float:
    """Dirichlet energy of the z-graph patch, pulled back to its footprint.

    On a surface swept by horizontal segments the intrinsic gradient of the
    graph function equals the segment slope s, and the vertical-plane area
    element pulls back to |phi_y - x/2| dx dy, so the energy is
    (1/2) iint s^2 |phi_y - x/2|.  Each smooth piece between the seams is
    integrated separately.
    """

    def integrand(x, y):
        s = comp.slope(x, y)
        return 0.5 * s * s * np.abs(comp.phi_y(x, y) - 0.5 * x)

    return float(sum(integrate_region(integrand, reg, cfg)
                     for reg in comp.regions.values()))


@dataclass(frozen=True, eq=False)
class CompareReport:
    """Window-truncated comparison of the spanning surfaces vs the broken plane.

    Areas compare the doubled minimal-kind surface against the broken-plane
    patch; energies compare the doubled harmonic-kind surface against the
    same patch.  All surfaces are truncated to the spatial slab
    |z| <= z_cap (area/energy of the tilted half-planes and wall pieces is
    exact; the compact z-graph patches are integrated numerically).
    """

    u: float
    z_cap: float
    z_floor: Optional[float]
    area_competitor: float
    area_reference: float
    energy_competitor: float
    energy_reference: float
    area_pieces: Mapping[str, float]
    energy_pieces: Mapping[str, float]
    minimal: Optional[CompetitorSurface]
    harmonic: Optional[CompetitorSurface]

    @property
    def area_margin(self) -> float:
        return self.area_reference - self.area_competitor

    @property
    def energy_margin(self) -> float:
        return self.energy_reference - self.energy_competitor


def competitor_compare(u: float, z_cap: Optional[float] = None,
                       z_floor: Optional[float] = None,
                       cfg: QuadConfig = _COMP_CFG,
                       resolution: int = 129) -> CompareReport:
    """Compare both spanning surfaces against the broken plane on a window.

    With the default window the doubled half-surfaces and the broken-plane
    patch are truncated to the slab |z| <= z_cap (default 2u).  Passing
    ``z_floor`` restricts the comparison to z >= z_floor; any floor above
    the sweep exit height leaves only the tilted half-plane on both sides,
    so the areas agree exactly.
    """
    if not u > 0:
        raise ValueError("u must be positive")
    z_cap = 2.0 * float(u) if z_cap is None else float(z_cap)
    root = math.sqrt(1.0 + u * u)

    minimal = build_competitor("minimal", u, resolution)
    harmonic = build_competitor("harmonic", u, resolution)
    b = minimal.exit_height
    if z_cap < max(b, u):
        raise ValueError("z_cap must clear the sweep exit height and fan")

    if z_floor is not None:
        z_floor = float(z_floor)
        if z_floor < b:
            raise ValueError(
                "a floor below the sweep exit height does not reduce the "
                "surfaces to a common half-plane")
        band = 2.0 * (z_cap - z_floor) * root
        pieces = {"band": band}
        eband_w = u * u * (z_cap - z_floor)
        return CompareReport(u, z_cap, z_floor, band, band, eband_w, eband_w,
                             pieces, {"band": eband_w}, minimal, harmonic)

    patch_min = patch_area(minimal, cfg=cfg)
    flats = 2.0 * (b - 0.5 * u)
    wall_min = 2.0 * root * (z_cap - b)
    area_comp = 2.0 * (patch_min + flats + wall_min)
    area_ref = broken_plane_area(u, z_cap)

    e_patch = patch_energy(harmonic, cfg=cfg)
    e_wall = u * u * (z_cap - 0.5 * u)
    energy_comp = 2.0 * (e_patch + e_wall)
    energy_ref = broken_plane_energy(u, z_cap)

    area_pieces = {
        "patch": patch_min,
        "flats": flats,
        "wall": wall_min,
        "reference_wedge": wedge_area(u),
        "reference_planes": 4.0 * z_cap * root,
    }
    energy_pieces = {
        "patch": e_patch,
        "wall": e_wall,
        "reference_fan": u ** 3 / 9.0,
        "reference_planes": 2.0 * u * u * z_cap,
    }
    return CompareReport(u, z_cap, None, area_comp, area_ref, energy_comp,
                         energy_ref, area_pieces, energy_pieces, minimal,
                         harmonic)
