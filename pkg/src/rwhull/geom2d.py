"""Exact planar convex geometry.

Hulls, perimeter, diameter, support functions, the Hausdorff metric between
convex polygons, and the inradius about the origin.  Polygons may be
degenerate: one vertex is a point, two vertices a segment whose perimeter is
twice its length (the boundary is traversed both ways).

Grid-based quantities (Cauchy perimeter, projection diameter, Hausdorff
distance) come with explicit error bounds derived from the Lipschitz constant
of the support function, ``|x.e(a) - x.e(b)| <= |x| |a - b|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from . import _hull

DEFAULT_HAUSDORFF_M = 4096
DEFAULT_ORACLE_M = 8192


class GeometryError(ValueError):
    """Invalid geometric input (empty set, non-finite value, wrong norm)."""


class DegenerateInputError(GeometryError):
    """Operation undefined for a degenerate polygon, e.g. scaling a point."""


class Vec2(NamedTuple):
    x: float
    y: float

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def as_points(points) -> np.ndarray:
    """Coerce a sequence of Vec2 / pairs / an (k, 2) array to float64 (k, 2)."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1 and arr.shape[0] == 2:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"expected an (k, 2) point array, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise GeometryError("point set is empty")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("point coordinates must be finite")
    return arr


@dataclass(frozen=True)
class DirectionGrid:
    """``m`` equally spaced angles over a full turn (``span="full"``,
    step 2pi/m) or a half turn (``span="half"``, step pi/m)."""

    m: int
    span: str = "full"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 4:
            raise GeometryError(f"direction grid needs m >= 4, got {self.m}")
        if self.span not in ("full", "half"):
            raise GeometryError(f"span must be 'full' or 'half', got {self.span!r}")

    @property
    def step(self) -> float:
        return (2.0 if self.span == "full" else 1.0) * math.pi / self.m

    @cached_property
    def angles(self) -> np.ndarray:
        return np.arange(self.m, dtype=np.float64) * self.step

    @cached_property
    def cos(self) -> np.ndarray:
        return np.cos(self.angles)

    @cached_property
    def sin(self) -> np.ndarray:
        return np.sin(self.angles)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Minimal CCW vertex list of a compact convex set.

    Build these with :func:`convex_hull`; the constructor trusts its input
    unless ``validate=True`` is passed to :meth:`from_vertices`.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_vertices(cls, vertices, validate: bool = True) -> "ConvexPolygon":
        v = as_points(vertices)
        if validate:
            _check_strictly_convex(v)
        return cls(v)

    @property
    def count(self) -> int:
        return self.vertices.shape[0]

    @property
    def kind(self) -> str:
        return {1: "point", 2: "segment"}.get(self.count, "polygon")

    @property
    def xs(self) -> np.ndarray:
        return self.vertices[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.vertices[:, 1]

    def vec(self, k: int) -> Vec2:
        return Vec2(float(self.vertices[k, 0]), float(self.vertices[k, 1]))

    def max_norm(self) -> float:
        return float(np.max(np.hypot(self.xs, self.ys)))

    def scaled(self, factor: float) -> "ConvexPolygon":
        if not factor > 0:
            raise GeometryError("scale factor must be positive")
        return ConvexPolygon(self.vertices * factor)

    def __eq__(self, other):
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def __repr__(self):
        return f"ConvexPolygon({self.kind}, {self.vertices.tolist()!r})"


def _check_strictly_convex(v: np.ndarray) -> None:
    n = v.shape[0]
    if n == 2 and np.array_equal(v[0], v[1]):
        raise GeometryError("segment endpoints coincide")
    if n < 3:
        return
    for k in range(n):
        a, b, c = v[k], v[(k + 1) % n], v[(k + 2) % n]
        if _hull.orient(a[0], a[1], b[0], b[1], c[0], c[1]) <= 0:
            raise GeometryError("vertices are not strictly convex and counter-clockwise")


def unit_vector(theta: float) -> Vec2:
    if not math.isfinite(theta):
        raise GeometryError(f"angle must be finite, got {theta!r}")
    return Vec2(math.cos(theta), math.sin(theta))


def convex_hull(points) -> ConvexPolygon:
    """Minimal CCW hull, starting from the lexicographically smallest vertex."""
    pts = as_points(points)
    idx = _hull.monotone_chain(pts[:, 0].copy(), pts[:, 1].copy())
    return ConvexPolygon(pts[idx])


def _canonical(xs: np.ndarray, ys: np.ndarray) -> ConvexPolygon:
    """Rotate a CCW cycle so it starts at the lexicographically smallest vertex."""
    if xs.shape[0] == 0:
        raise GeometryError("empty hull")
    start = int(np.lexsort((ys, xs))[0])
    v = np.column_stack((np.roll(xs, -start), np.roll(ys, -start)))
    return ConvexPolygon(v)


def perimeter(K: ConvexPolygon) -> float:
    return float(_hull.perimeter(K.xs, K.ys, K.count))


def diameter(K: ConvexPolygon) -> tuple[float, tuple[int, int]]:
    """Rotating-calipers diameter with the lowest-index witness pair."""
    d, i, j = _hull.diameter(K.xs, K.ys, K.count)
    return float(d), (int(i), int(j))


def _grid(grid, span: str) -> DirectionGrid:
    if isinstance(grid, DirectionGrid):
        if grid.span != span:
            raise GeometryError(f"expected a {span}-turn direction grid")
        return grid
    return DirectionGrid(int(grid), span)


def cauchy_perimeter(points, grid=DEFAULT_ORACLE_M) -> tuple[float, float]:
    """Riemann sum of the support function over a full turn.

    Evaluated by brute force over all points, independent of the hull code.
    Returns ``(value, error_bound)`` where the bound is ``2 pi R (pi / m)``.
    """
    pts = as_points(points)
    g = _grid(grid, "full")
    support = np.max(pts[:, :1] * g.cos + pts[:, 1:] * g.sin, axis=0)
    radius = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
    return float(support.sum() * g.step), 2.0 * math.pi * radius * (math.pi / g.m)


def projection_range(points, theta: float) -> float:
    pts = as_points(points)
    u = unit_vector(theta)
    proj = pts[:, 0] * u.x + pts[:, 1] * u.y
    return float(proj.max() - proj.min())


def diameter_via_projections(points, grid=DEFAULT_ORACLE_M) -> tuple[float, float]:
    """Largest projection range over a half-turn grid (brute force).

    Never exceeds the true diameter; returns ``(value, error_bound)`` with
    ``error_bound = 2 value (1 - cos(pi / 2m)) / cos(pi / 2m)``, i.e. the
    documented ``2 D (1 - cos(pi/2m))`` slack expressed through the value.
    """
    pts = as_points(points)
    g = _grid(grid, "half")
    proj = pts[:, :1] * g.cos + pts[:, 1:] * g.sin
    value = float(np.max(proj.max(axis=0) - proj.min(axis=0)))
    c = math.cos(math.pi / (2 * g.m))
    return value, 2.0 * value * (1.0 - c) / c


def support(K: ConvexPolygon, direction) -> float:
    u = np.asarray(direction, dtype=np.float64)
    if u.shape != (2,) or not np.all(np.isfinite(u)):
        raise GeometryError("direction must be a finite 2-vector")
    if abs(math.hypot(u[0], u[1]) - 1.0) > 1e-9:
        raise GeometryError("direction must be a unit vector")
    return float(np.max(K.xs * u[0] + K.ys * u[1]))


def support_values(K: ConvexPolygon, grid: DirectionGrid) -> np.ndarray:
    """Support function sampled on a full-turn grid, O(h + m)."""
    g = _grid(grid, "full")
    out = np.empty(g.m, dtype=np.float64)
    _hull.support_sweep(K.xs, K.ys, K.count, g.cos, g.sin, out)
    return out


def hausdorff(K1: ConvexPolygon, K2: ConvexPolygon,
              grid=DEFAULT_HAUSDORFF_M) -> tuple[float, float]:
    """Hausdorff distance through support functions.

    Returns ``(value, error_bound)``; the exact distance lies in
    ``[value, value + error_bound]`` with ``error_bound = (R1 + R2) pi / m``.
    """
    g = _grid(grid, "full")
    if g.m < 16:
        raise GeometryError("Hausdorff grid needs m >= 16")
    diff = np.abs(support_values(K1, g) - support_values(K2, g))
    bound = (K1.max_norm() + K2.max_norm()) * math.pi / g.m
    return float(diff.max()), bound


def scale_unit_diameter(K: ConvexPolygon) -> ConvexPolygon:
    d, _ = diameter(K)
    if d <= 0.0:
        raise DegenerateInputError("cannot rescale a zero-diameter set")
    return ConvexPolygon(K.vertices / d)


def inradius_at_origin(K: ConvexPolygon) -> float:
    return float(_hull.origin_inradius(K.xs, K.ys, K.count))


def regular_polygon(count: int, circumradius: float = 1.0,
                    center: Sequence[float] = (0.0, 0.0), phase: float = 0.0) -> ConvexPolygon:
    k = np.arange(count, dtype=np.float64)
    ang = phase + 2.0 * math.pi * k / count
    v = np.column_stack((center[0] + circumradius * np.cos(ang),
                         center[1] + circumradius * np.sin(ang)))
    return convex_hull(v)


def point_polygon_distance(p, K: ConvexPolygon) -> float:
    """Euclidean distance from p to K (0 inside). Used by fattening checks."""
    px, py = float(p[0]), float(p[1])
    v = K.vertices
    n = K.count
    if n == 1:
        return math.hypot(px - v[0, 0], py - v[0, 1])
    if n >= 3:
        inside = all(
            _hull.orient(v[k, 0], v[k, 1], v[(k + 1) % n, 0], v[(k + 1) % n, 1], px, py) >= 0
            for k in range(n)
        )
        if inside:
            return 0.0
    best = math.inf
    edges = n if n >= 3 else 1
    for k in range(edges):
        a, b = v[k], v[(k + 1) % n]
        dx, dy = b[0] - a[0], b[1] - a[1]
        t = ((px - a[0]) * dx + (py - a[1]) * dy) / (dx * dx + dy * dy)
        t = min(1.0, max(0.0, t))
        best = min(best, math.hypot(px - a[0] - t * dx, py - a[1] - t * dy))
    return best
