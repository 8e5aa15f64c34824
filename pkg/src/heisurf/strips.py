"""Ruled strips over the vertical axis and their profile functions.

A profile sigma assigns to each height z the slope of a horizontal line
through (0, 0, z); the union of these lines over |x| <= x_max is the strip

    S_sigma = { (x, x sigma(z), z) : |x| <= x_max }.

The same surface can be described by the profile alpha of the graph function
along {x = 1}: the height change of variables is z = w + alpha(w)/2 with
inverse w = z - sigma(z)/2, and both directions map piecewise-linear
profiles to piecewise-linear profiles knot by knot, with slope maps
s -> 2s/(2+s) and t -> 2t/(2-t).  A slope of exactly -2 in alpha collapses
a whole w-interval to one height: the surface there is a fan of lines, not
a graph over the axis, and the conversion refuses it.

A strip is graphical (the ruling equation z - x^2 sigma(z)/2 = z' has a
unique solution for every |x| <= x_max) when sigma's slopes lie in [-2, 2);
such strips are area-minimizing.  The broken plane with opening u > 0 - the
half-planes {y = -ux, z > 0} and {y = ux, z < 0} joined by the flat sector
{z = 0, |y| <= u|x|} - is the basic non-minimizing example: it carries
horizontal chords whose endpoints lie on the surface but whose interior
does not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import GroupPoint, HorizontalLine, project_arr
from .graphs import ScalarField
from .quadrature import VRegion

__all__ = [
    "ProfileError",
    "Profile",
    "PwlProfile",
    "CallableProfile",
    "sigma_to_alpha",
    "alpha_to_sigma",
    "eta_of",
    "GraphicalStrip",
    "BrokenPlane",
    "broken_plane",
    "strip_surface",
    "is_graphical_strip",
    "is_area_minimizing",
]


class ProfileError(ValueError):
    pass


class Profile:
    """Real function of one variable with slope and tail information."""

    def __call__(self, w):  # pragma: no cover - abstract
        raise NotImplementedError

    def derivative(self, w):  # pragma: no cover - abstract
        raise NotImplementedError

    def slope_bounds(self) -> tuple[float, float]:  # pragma: no cover
        raise NotImplementedError

    def limits(self) -> tuple[float, float]:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class PwlProfile(Profile):
    """Piecewise-linear profile: knot points plus slopes beyond each end.

    Evaluation, algebra, inversion and composition are all exact: every
    operation produces the knots of the result directly instead of sampling.
    """

    w: np.ndarray
    v: np.ndarray
    slope_left: float = 0.0
    slope_right: float = 0.0

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.w, dtype=float))
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        if w.ndim != 1 or w.shape != v.shape or len(w) == 0:
            raise ProfileError("knots must be matching non-empty 1-d arrays")
        if len(w) > 1 and not np.all(np.diff(w) > 0):
            raise ProfileError("knot positions must be strictly increasing")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
            raise ProfileError("knots must be finite")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "slope_left", float(self.slope_left))
        object.__setattr__(self, "slope_right", float(self.slope_right))

    # -- construction -------------------------------------------------------

    @staticmethod
    def constant(c: float) -> "PwlProfile":
        return PwlProfile(np.array([0.0]), np.array([float(c)]), 0.0, 0.0)

    @staticmethod
    def line(slope: float, intercept: float = 0.0) -> "PwlProfile":
        return PwlProfile(np.array([0.0]), np.array([float(intercept)]),
                          float(slope), float(slope))

    @staticmethod
    def from_knots(points: Sequence[tuple[float, float]],
                   slope_left: float = 0.0,
                   slope_right: float = 0.0) -> "PwlProfile":
        pts = np.asarray(points, dtype=float)
        return PwlProfile(pts[:, 0], pts[:, 1], slope_left, slope_right)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        out = np.interp(w, self.w, self.v)
        out = np.where(w < self.w[0],
                       self.v[0] + self.slope_left * (w - self.w[0]), out)
        out = np.where(w > self.w[-1],
                       self.v[-1] + self.slope_right * (w - self.w[-1]), out)
        return out if out.ndim else float(out)

    def piece_slopes(self) -> np.ndarray:
        interior = np.diff(self.v) / np.diff(self.w) if len(self.w) > 1 else np.empty(0)
        return np.concatenate([[self.slope_left], interior, [self.slope_right]])

    def derivative(self, w):
        """Right-continuous slope: at a knot, the slope of the piece after it."""
        w = np.asarray(w, dtype=float)
        idx = np.searchsorted(self.w, w, side="right")
        out = self.piece_slopes()[idx]
        return out if out.ndim else float(out)

    def slope_bounds(self) -> tuple[float, float]:
        s = self.piece_slopes()
        return float(np.min(s)), float(np.max(s))

    def limits(self) -> tuple[float, float]:
        left = float(self.v[0]) if self.slope_left == 0 else (
            -math.inf if self.slope_left > 0 else math.inf)
        right = float(self.v[-1]) if self.slope_right == 0 else (
            math.inf if self.slope_right > 0 else -math.inf)
        return left, right

    # -- exact algebra ------------------------------------------------------

    def _binary(self, other, op) -> "PwlProfile":
        if np.isscalar(other) or isinstance(other, (int, float)):
            return PwlProfile(self.w, op(self.v, float(other)),
                              self.slope_left, self.slope_right)
        if not isinstance(other, PwlProfile):
            return NotImplemented
        grid = np.unique(np.concatenate([self.w, other.w]))
        return PwlProfile(
            grid, op(self(grid), other(grid)),
            float(op(self.slope_left, other.slope_left)),
            float(op(self.slope_right, other.slope_right)),
        )

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return self * (-1.0)

    def __mul__(self, c: float):
        c = float(c)
        return PwlProfile(self.w, self.v * c, self.slope_left * c,
                          self.slope_right * c)

    __rmul__ = __mul__

    def shifted(self, dw: float = 0.0, dv: float = 0.0) -> "PwlProfile":
        return PwlProfile(self.w + float(dw), self.v + float(dv),
                          self.slope_left, self.slope_right)

    def inverse(self) -> "PwlProfile":
        slopes = self.piece_slopes()
        if np.any(slopes <= 0):
            raise ProfileError("inverse needs a strictly increasing profile")
        return PwlProfile(self.v, self.w, 1.0 / self.slope_left,
                          1.0 / self.slope_right)

    def compose(self, inner: "PwlProfile") -> "PwlProfile":
        """Exact self(inner(.)) for a nondecreasing inner profile.

        Each outer knot is pulled back through the leftmost preimage; where
        the inner profile plateaus, both plateau endpoints are inner knots
        already, so the composition stays exactly piecewise linear.
        """
        if np.any(inner.piece_slopes() < 0):
            raise ProfileError("compose needs a nondecreasing inner profile")
        wi, vi = inner.w, inner.v
        pulled: list[float] = []
        for v in self.w:
            if v < vi[0]:
                if inner.slope_left > 0:
                    pulled.append(float(wi[0] - (vi[0] - v) / inner.slope_left))
            elif v > vi[-1]:
                if inner.slope_right > 0:
                    pulled.append(float(wi[-1] + (v - vi[-1]) / inner.slope_right))
            else:
                i = int(np.searchsorted(vi, v, side="left"))
                if vi[i] == v:
                    pulled.append(float(wi[i]))
                else:
                    frac = (v - vi[i - 1]) / (vi[i] - vi[i - 1])
                    pulled.append(float(wi[i - 1] + frac * (wi[i] - wi[i - 1])))
        grid = np.unique(np.concatenate([wi, np.asarray(pulled, dtype=float)])) \
            if pulled else wi
        return PwlProfile(
            grid, self(inner(grid)),
            self.slope_left * inner.slope_left,
            self.slope_right * inner.slope_right,
        )


@dataclass(frozen=True)
class CallableProfile(Profile):
    """Closed-form profile; slope range and tail limits supplied by caller."""

    fn: Callable[[np.ndarray], np.ndarray]
    dfn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tails: Optional[tuple[float, float]] = None
    slopes: Optional[tuple[float, float]] = None
    name: str = ""

    def __call__(self, w):
        out = np.asarray(self.fn(np.asarray(w, dtype=float)), dtype=float)
        return out if out.ndim else float(out)

    def derivative(self, w):
        w = np.asarray(w, dtype=float)
        if self.dfn is not None:
            out = np.asarray(self.dfn(w), dtype=float)
            return out if out.ndim else float(out)
        h = 1e-6 * (1.0 + np.abs(w))
        out = (self(w + h) - self(w - h)) / (2.0 * h)
        return out if np.ndim(out) else float(out)

    def slope_bounds(self) -> tuple[float, float]:
        if self.slopes is None:
            raise ProfileError("slope range not declared for this profile")
        return self.slopes

    def limits(self) -> tuple[float, float]:
        if self.tails is None:
            raise ProfileError("tail limits not declared for this profile")
        return self.tails


# ---------------------------------------------------------------------------
# profile transforms


def _map_end_slope(s: float, kind: str) -> float:
    if kind == "alpha_from_sigma":
        return 2.0 * s / (2.0 - s)
    return 2.0 * s / (2.0 + s)


def sigma_to_alpha(sigma: PwlProfile) -> PwlProfile:
    """Reparameterize a slope profile by graph height: knot (z, s) -> (z - s/2, s)."""
    if not isinstance(sigma, PwlProfile):
        raise ProfileError("exact transform needs a piecewise-linear profile")
    if np.any(sigma.piece_slopes() >= 2.0):
        raise ProfileError("slope >= 2 breaks the height change of variables")
    return PwlProfile(
        sigma.w - sigma.v / 2.0, sigma.v,
        _map_end_slope(sigma.slope_left, "alpha_from_sigma"),
        _map_end_slope(sigma.slope_right, "alpha_from_sigma"),
    )


def alpha_to_sigma(alpha: PwlProfile) -> PwlProfile:
    """Inverse reparameterization: knot (w, a) -> (w + a/2, a).

    A piece of slope exactly -2 maps a whole interval to a single height
    (a fan, not a graph) and is refused; slopes below -2 fold the strip over.
    """
    if not isinstance(alpha, PwlProfile):
        raise ProfileError("exact transform needs a piecewise-linear profile")
    slopes = alpha.piece_slopes()
    if np.any(slopes == -2.0):
        raise ProfileError("plateau: slope -2 collapses an interval of heights")
    if np.any(slopes < -2.0):
        raise ProfileError("not graphical: slope below -2 folds the strip")
    return PwlProfile(
        alpha.w + alpha.v / 2.0, alpha.v,
        _map_end_slope(alpha.slope_left, "sigma_from_alpha"),
        _map_end_slope(alpha.slope_right, "sigma_from_alpha"),
    )


def eta_of(alpha: PwlProfile) -> PwlProfile:
    """Height map w -> w + alpha(w)/2 as an exact piecewise-linear profile."""
    if not isinstance(alpha, PwlProfile):
        raise ProfileError("exact transform needs a piecewise-linear profile")
    return PwlProfile(
        alpha.w, alpha.w + alpha.v / 2.0,
        1.0 + alpha.slope_left / 2.0,
        1.0 + alpha.slope_right / 2.0,
    )


# ---------------------------------------------------------------------------
# ruling-equation solver


def _solve_height(sigma: Profile, x: np.ndarray, zprime: np.ndarray,
                  iters: int = 64) -> np.ndarray:
    """Solve z - x^2 sigma(z)/2 = z' by expanding-bracket bisection.

    Assumes the left side is strictly increasing in z (graphical strip).
    """
    x = np.asarray(x, dtype=float)
    zprime = np.asarray(zprime, dtype=float)
    x, zprime = np.broadcast_arrays(x, zprime)
    half_x2 = 0.5 * x * x

    def g(z):
        return z - half_x2 * np.asarray(sigma(z)) - zprime

    span = np.ones_like(zprime)
    lo = zprime - span
    hi = zprime + span
    for _ in range(64):
        bad = g(lo) > 0.0
        if not bad.any():
            break
        span2 = np.where(bad, 2.0 * (zprime - lo), 0.0)
        lo = np.where(bad, zprime - span2, lo)
    for _ in range(64):
        bad = g(hi) < 0.0
        if not bad.any():
            break
        span2 = np.where(bad, 2.0 * (hi - zprime), 0.0)
        hi = np.where(bad, zprime + span2, hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = g(mid) <= 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# strips


@dataclass(frozen=True)
class GraphicalStrip:
    """Union of horizontal lines (x, x sigma(z), z) over |x| <= x_max."""

    sigma: Profile
    x_max: float = 1.0

    def ruling(self, z: float) -> HorizontalLine:
        return HorizontalLine(GroupPoint(0.0, 0.0, float(z)),
                              float(self.sigma(float(z))))

    def points(self, x, z) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        return np.stack(np.broadcast_arrays(x, x * np.asarray(self.sigma(z)), z),
                        axis=-1)

    def membership_offset(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return p[..., 1] - p[..., 0] * np.asarray(self.sigma(p[..., 2]))

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return (np.abs(self.membership_offset(p)) <= tol) & \
            (np.abs(p[..., 0]) <= self.x_max + tol)

    def is_graphical(self) -> bool:
        lo, hi = self.sigma.slope_bounds()
        return lo >= -2.0 and hi < 2.0

    def graph_field(self, z_window: tuple[float, float]) -> ScalarField:
        """Intrinsic graph function of the strip over a height window."""
        if not self.is_graphical():
            raise ProfileError("strip is not a graph over the axis")
        z0, z1 = map(float, z_window)
        sigma = self.sigma

        def fn(x, zp):
            z = _solve_height(sigma, x, zp)
            return np.asarray(x) * np.asarray(sigma(z))

        return ScalarField.from_function(
            fn, (-self.x_max, self.x_max, z0, z1), name="strip")

    def field_regions(self, z_window: tuple[float, float]) -> list[VRegion]:
        """Bands of the graph window between knot parabolas z' = z_i - x^2 s_i/2.

        The graph function is smooth inside each band; integrating band by
        band keeps its slope kinks on region boundaries.
        """
        if not isinstance(self.sigma, PwlProfile):
            return [VRegion.rect(-self.x_max, self.x_max, *z_window)]
        z0, z1 = map(float, z_window)
        xm = self.x_max

        def parab(zi, si):
            return lambda x, zi=zi, si=si: zi - 0.5 * si * np.asarray(x) ** 2

        floor = lambda x: np.full(np.shape(x), z0, dtype=float)
        ceil = lambda x: np.full(np.shape(x), z1, dtype=float)
        walls = [floor]
        for zi, si in zip(self.sigma.w, self.sigma.v):
            p = parab(zi, si)
            walls.append(lambda x, p=p: np.clip(p(x), z0, z1))
        walls.append(ceil)
        out = []
        for lo, hi in zip(walls[:-1], walls[1:]):
            out.append(VRegion(-xm, xm, lo, hi))
        return out


@dataclass(frozen=True)
class BrokenPlane:
    """Two half-planes y = -+ u x joined across a flat sector at height zero."""

    u: float
    x_max: float = 1.0

    def __post_init__(self):
        if self.u < 0:
            raise ValueError("opening must be nonnegative")

    def value(self, x, zp):
        """Graph function over the axis: the fan contributes -2 z'/x."""
        x = np.asarray(x, dtype=float)
        zp = np.asarray(zp, dtype=float)
        u = self.u
        safe = np.where(x != 0.0, x, 1.0)
        fan = -2.0 * zp / safe
        out = np.where(zp > 0.5 * u * x * x, -u * x,
                       np.where(zp < -0.5 * u * x * x, u * x, fan))
        return out if out.ndim else float(out)

    def graph_field(self, z_window: Optional[tuple[float, float]] = None) -> ScalarField:
        if z_window is None:
            half = max(self.u, 1.0) * self.x_max ** 2
            z_window = (-half, half)
        return ScalarField.from_function(
            self.value, (-self.x_max, self.x_max, *z_window),
            entire=True, name="broken-plane")

    def fan_region(self) -> VRegion:
        u, xm = self.u, self.x_max
        return VRegion(-xm, xm,
                       lambda x: -0.5 * u * np.asarray(x) ** 2,
                       lambda x: 0.5 * u * np.asarray(x) ** 2)

    def upper_region(self, z_top: float) -> VRegion:
        u, xm = self.u, self.x_max
        return VRegion(-xm, xm,
                       lambda x: 0.5 * u * np.asarray(x) ** 2,
                       lambda x: np.full(np.shape(x), float(z_top)))

    def lower_region(self, z_bottom: float) -> VRegion:
        u, xm = self.u, self.x_max
        return VRegion(-xm, xm,
                       lambda x: np.full(np.shape(x), float(z_bottom)),
                       lambda x: -0.5 * u * np.asarray(x) ** 2)

    def membership_offset(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        flat = project_arr(p.reshape(-1, 3))
        vals = self.value(flat[:, 0], flat[:, 1])
        off = p.reshape(-1, 3)[:, 1] - vals
        return off.reshape(p.shape[:-1])

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return (np.abs(self.membership_offset(p)) <= tol) & \
            (np.abs(p[..., 0]) <= self.x_max + tol)

    def witness_chord(self) -> tuple[GroupPoint, GroupPoint]:
        """Horizontal chord with both ends on the surface but not its interior."""
        u = self.u
        if u <= 0:
            raise ValueError("the flat plane has no such chord")
        h = 0.5 * self.x_max
        return (GroupPoint(h, -u * h, u * h * h / 2.0),
                GroupPoint(-h, -u * h, -u * h * h / 2.0))


def broken_plane(u: float, x_max: float = 1.0) -> BrokenPlane:
    return BrokenPlane(float(u), float(x_max))


def strip_surface(profile: Profile, kind: str = "sigma",
                  x_max: float = 1.0) -> GraphicalStrip:
    """Build a strip from a slope profile ('sigma') or a graph profile ('alpha')."""
    if kind == "alpha":
        profile = alpha_to_sigma(profile)
    elif kind != "sigma":
        raise ValueError("kind must be 'sigma' or 'alpha'")
    return GraphicalStrip(profile, float(x_max))


def is_graphical_strip(strip: GraphicalStrip) -> bool:
    return strip.is_graphical()


def is_area_minimizing(surface) -> bool:
    """Structural minimality test.

    Graphical strips calibrate their own boundary data, so graphical implies
    minimizing.  A broken plane with positive opening admits a horizontal
    chord that a competitor can shortcut, so it is not minimizing.
    """
    if isinstance(surface, GraphicalStrip):
        return surface.is_graphical()
    if isinstance(surface, BrokenPlane):
        return surface.u == 0.0
    raise TypeError(f"no minimality test for {type(surface).__name__}")
