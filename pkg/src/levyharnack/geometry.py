"""Open-set descriptors for exit sampling.

Each geometry provides a vectorized membership test, a lower bound on the
distance to the complement (exact for every shipped variant except the
cone, where it is the exact formula clipped at the vertex), a bounding
radius, and a witness point in the interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModelError

__all__ = [
    "Geometry", "Ball", "HalfSpaceCapBall", "ConeCapBall", "SlitBall",
    "Annulus", "BallComplement", "Slab", "IntersectionWithBall",
    "geometry_from_mapping", "geometry_to_mapping",
]


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ModelError("direction vector must be nonzero")
    return v / n


def _as_points(x, d):
    pts = np.asarray(x, dtype=float)
    squeeze = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != d:
        raise DomainError(f"points must have dimension {d}")
    return pts, squeeze


class Geometry:
    """Base open-set descriptor."""

    d: int
    is_bounded = True

    def contains(self, x):
        raise NotImplementedError

    def dist_to_complement(self, x):
        raise NotImplementedError

    @property
    def bounding_radius(self) -> float:
        raise NotImplementedError

    @property
    def witness(self) -> np.ndarray:
        """A point guaranteed to lie inside the set."""
        raise NotImplementedError

    @property
    def anchor(self) -> np.ndarray:
        """Reference point for binning (the geometric center)."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Ball(Geometry):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0.0:
            raise ModelError("ball radius must be positive")

    @property
    def d(self):
        return self.center.size

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        out = np.linalg.norm(pts - self.center, axis=-1) < self.radius
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        out = self.radius - np.linalg.norm(pts - self.center, axis=-1)
        out = np.maximum(out, 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return self.radius

    @property
    def witness(self):
        return self.center.copy()

    anchor = witness


@dataclass(frozen=True, eq=False)
class HalfSpaceCapBall(Geometry):
    """{(x - center) . normal > 0} intersected with B(center, radius)."""

    center: np.ndarray
    radius: float
    normal: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        n = self.normal if self.normal is not None else np.eye(c.size)[0]
        object.__setattr__(self, "normal", _unit(n))
        if self.radius <= 0.0:
            raise ModelError("radius must be positive")

    @property
    def d(self):
        return self.center.size

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        rel = pts - self.center
        out = ((rel @ self.normal > 0.0)
               & (np.linalg.norm(rel, axis=-1) < self.radius))
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        rel = pts - self.center
        out = np.minimum(rel @ self.normal,
                         self.radius - np.linalg.norm(rel, axis=-1))
        out = np.maximum(out, 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return self.radius

    @property
    def witness(self):
        return self.center + 0.5 * self.radius * self.normal

    @property
    def anchor(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class ConeCapBall(Geometry):
    """{angle(x - center, axis) < aperture} intersected with B(center, radius)."""

    center: np.ndarray
    radius: float
    aperture: float
    axis: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        a = self.axis if self.axis is not None else np.eye(c.size)[0]
        object.__setattr__(self, "axis", _unit(a))
        if not 0.0 < self.aperture < math.pi:
            raise ModelError("aperture must lie in (0, pi)")
        if self.radius <= 0.0:
            raise ModelError("radius must be positive")
        if c.size < 2:
            raise ModelError("cone geometry needs d >= 2")

    @property
    def d(self):
        return self.center.size

    def _angles(self, rel):
        rho = np.linalg.norm(rel, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = np.where(rho > 0.0, (rel @ self.axis) / rho, 1.0)
        return rho, np.arccos(np.clip(cosang, -1.0, 1.0))

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        rho, ang = self._angles(pts - self.center)
        out = (rho > 0.0) & (rho < self.radius) & (ang < self.aperture)
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        rho, ang = self._angles(pts - self.center)
        lateral = rho * np.sin(np.clip(self.aperture - ang, 0.0, 0.5 * math.pi))
        out = np.maximum(np.minimum(lateral, self.radius - rho), 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return self.radius

    @property
    def witness(self):
        return self.center + 0.5 * self.radius * self.axis

    @property
    def anchor(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class SlitBall(Geometry):
    """B(center, radius) minus the closed slab {|(x - center) . normal| <= halfwidth}."""

    center: np.ndarray
    radius: float
    halfwidth: float
    normal: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        n = self.normal if self.normal is not None else np.eye(c.size)[-1]
        object.__setattr__(self, "normal", _unit(n))
        if not 0.0 < self.halfwidth < self.radius:
            raise ModelError("slab half-width must lie in (0, radius)")

    @property
    def d(self):
        return self.center.size

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        rel = pts - self.center
        out = ((np.abs(rel @ self.normal) > self.halfwidth)
               & (np.linalg.norm(rel, axis=-1) < self.radius))
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        rel = pts - self.center
        out = np.minimum(np.abs(rel @ self.normal) - self.halfwidth,
                         self.radius - np.linalg.norm(rel, axis=-1))
        out = np.maximum(out, 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return self.radius

    @property
    def witness(self):
        return self.center + (0.5 * (self.halfwidth + self.radius)) * self.normal

    @property
    def anchor(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class Annulus(Geometry):
    center: np.ndarray
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not 0.0 < self.r_inner < self.r_outer:
            raise ModelError("annulus needs 0 < r_inner < r_outer")

    @property
    def d(self):
        return self.center.size

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        rho = np.linalg.norm(pts - self.center, axis=-1)
        out = (rho > self.r_inner) & (rho < self.r_outer)
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        rho = np.linalg.norm(pts - self.center, axis=-1)
        out = np.maximum(np.minimum(rho - self.r_inner, self.r_outer - rho), 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return self.r_outer

    @property
    def witness(self):
        w = self.center.copy()
        w[0] += 0.5 * (self.r_inner + self.r_outer)
        return w

    @property
    def anchor(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class BallComplement(Geometry):
    """The unbounded open set {|x - center| > radius}."""

    center: np.ndarray
    radius: float
    is_bounded = False

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0.0:
            raise ModelError("radius must be positive")

    @property
    def d(self):
        return self.center.size

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        out = np.linalg.norm(pts - self.center, axis=-1) > self.radius
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        out = np.maximum(
            np.linalg.norm(pts - self.center, axis=-1) - self.radius, 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return math.inf

    @property
    def witness(self):
        w = self.center.copy()
        w[0] += 2.0 * self.radius
        return w

    @property
    def anchor(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class Slab(Geometry):
    """{lo < x_0 < hi}: the first-coordinate interval, any ambient dimension.

    This is the geometry of the one-dimensional projection device: exit of
    the slab is exactly the interval exit of the projected process.
    """

    d: int
    lo: float
    hi: float
    is_bounded = False  # unbounded in the transverse directions for d > 1

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ModelError("slab needs lo < hi")

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        out = (pts[..., 0] > self.lo) & (pts[..., 0] < self.hi)
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        out = np.maximum(
            np.minimum(pts[..., 0] - self.lo, self.hi - pts[..., 0]), 0.0)
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return 0.5 * (self.hi - self.lo)

    @property
    def witness(self):
        w = np.zeros(self.d)
        w[0] = 0.5 * (self.lo + self.hi)
        return w

    anchor = witness


@dataclass(frozen=True, eq=False)
class IntersectionWithBall(Geometry):
    """base ∩ B(center, radius): the local window every boundary-behavior
    experiment works in."""

    base: Geometry
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0.0:
            raise ModelError("radius must be positive")

    @property
    def d(self):
        return self.base.d

    def contains(self, x):
        pts, sq = _as_points(x, self.d)
        out = (self.base.contains(pts)
               & (np.linalg.norm(pts - self.center, axis=-1) < self.radius))
        return bool(out[0]) if sq else out

    def dist_to_complement(self, x):
        pts, sq = _as_points(x, self.d)
        out = np.minimum(
            self.base.dist_to_complement(pts),
            np.maximum(self.radius - np.linalg.norm(pts - self.center, axis=-1),
                       0.0))
        return float(out[0]) if sq else out

    @property
    def bounding_radius(self):
        return min(self.base.bounding_radius, self.radius)

    @property
    def witness(self):
        w = self.base.witness
        if self.contains(w):
            return w
        # pull the base witness toward the ball center until inside
        for frac in np.linspace(0.9, 0.05, 18):
            cand = self.center + frac * (w - self.center)
            if self.contains(cand):
                return cand
        raise ModelError("could not locate a witness in the intersection")

    @property
    def anchor(self):
        return self.center.copy()


def _fmt_vec(v):
    return ",".join(repr(float(x)) for x in np.asarray(v, dtype=float))


def _parse_vec(s):
    return np.array([float(x) for x in s.split(",")])


def geometry_to_mapping(g: Geometry) -> dict:
    if isinstance(g, Ball):
        return {"variant": "ball", "center": _fmt_vec(g.center),
                "radius": repr(g.radius)}
    if isinstance(g, HalfSpaceCapBall):
        return {"variant": "halfspace_ball", "center": _fmt_vec(g.center),
                "radius": repr(g.radius), "normal": _fmt_vec(g.normal)}
    if isinstance(g, ConeCapBall):
        return {"variant": "cone_ball", "center": _fmt_vec(g.center),
                "radius": repr(g.radius), "aperture": repr(g.aperture),
                "axis": _fmt_vec(g.axis)}
    if isinstance(g, SlitBall):
        return {"variant": "slit_ball", "center": _fmt_vec(g.center),
                "radius": repr(g.radius), "halfwidth": repr(g.halfwidth),
                "normal": _fmt_vec(g.normal)}
    if isinstance(g, Annulus):
        return {"variant": "annulus", "center": _fmt_vec(g.center),
                "r_inner": repr(g.r_inner), "r_outer": repr(g.r_outer)}
    if isinstance(g, BallComplement):
        return {"variant": "ball_complement", "center": _fmt_vec(g.center),
                "radius": repr(g.radius)}
    if isinstance(g, Slab):
        return {"variant": "slab", "d": str(g.d), "lo": repr(g.lo),
                "hi": repr(g.hi)}
    raise ModelError(f"cannot serialize geometry {type(g).__name__}")


def geometry_from_mapping(mapping: dict) -> Geometry:
    v = mapping.get("variant")
    if v == "ball":
        return Ball(center=_parse_vec(mapping["center"]),
                    radius=float(mapping["radius"]))
    if v == "halfspace_ball":
        return HalfSpaceCapBall(center=_parse_vec(mapping["center"]),
                                radius=float(mapping["radius"]),
                                normal=_parse_vec(mapping["normal"])
                                if "normal" in mapping else None)
    if v == "cone_ball":
        return ConeCapBall(center=_parse_vec(mapping["center"]),
                           radius=float(mapping["radius"]),
                           aperture=float(mapping["aperture"]),
                           axis=_parse_vec(mapping["axis"])
                           if "axis" in mapping else None)
    if v == "slit_ball":
        return SlitBall(center=_parse_vec(mapping["center"]),
                        radius=float(mapping["radius"]),
                        halfwidth=float(mapping["halfwidth"]),
                        normal=_parse_vec(mapping["normal"])
                        if "normal" in mapping else None)
    if v == "annulus":
        return Annulus(center=_parse_vec(mapping["center"]),
                       r_inner=float(mapping["r_inner"]),
                       r_outer=float(mapping["r_outer"]))
    if v == "ball_complement":
        return BallComplement(center=_parse_vec(mapping["center"]),
                              radius=float(mapping["radius"]))
    if v == "slab":
        return Slab(d=int(mapping["d"]), lo=float(mapping["lo"]),
                    hi=float(mapping["hi"]))
    raise ModelError(f"unknown geometry variant {v!r}")
