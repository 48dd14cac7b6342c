"""Planar primitives: cross products, cones, convex hulls.

All sign decisions use the absolute tolerance ``EPS``.  Anything within
``EPS`` of zero counts as zero, so strict tests fail on near-degenerate
input instead of flipping at random.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

EPS = 1e-12


def cross(a, b):
    """Scalar cross product a1*b2 - a2*b1 (broadcasts over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def perp(a):
    """Rotate by +90 degrees: (a1, a2) -> (-a2, a1)."""
    a = np.asarray(a, dtype=float)
    return np.stack([-a[..., 1], a[..., 0]], axis=-1)


def as_points(points, *, distinct: bool = False) -> np.ndarray:
    """Validate a point cloud and return it as a float (n, 2) array."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point cloud contains non-finite coordinates")
    if distinct and len(arr) > 1:
        if len(np.unique(arr, axis=0)) != len(arr):
            raise ValueError("point cloud contains duplicate points")
    return arr


@dataclass(frozen=True)
class Cone2:
    """Closed cone {a*w + b*v : a, b >= 0} with w x v > 0."""

    w: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if w.shape != (2,) or v.shape != (2,):
            raise ValueError("cone generators must be 2-vectors")
        if cross(w, v) <= EPS:
            raise ValueError("cone generators must satisfy w x v > 0")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", v)

    @property
    def opening(self) -> float:
        return float(cross(self.w, self.v))

    def coords(self, x) -> np.ndarray:
        """Unnormalised cone coordinates (x cross v, w cross x).

        Both are positive exactly on the open cone; dividing by ``opening``
        gives the coefficients of w and v.
        """
        x = np.asarray(x, dtype=float)
        return np.stack([cross(x, self.v), cross(self.w, x)], axis=-1)

    def __neg__(self) -> "Cone2":
        return Cone2(-self.w, -self.v)


def cone_contains(c: Cone2, x, strict: bool = True):
    """Membership of x (or an array of points) in the cone ``c``.

    strict=True tests the open cone: w x x > EPS and x x v > EPS.
    strict=False tests the closed cone with the same tolerance.
    """
    x = np.asarray(x, dtype=float)
    s = cross(c.w, x)
    t = cross(x, c.v)
    if strict:
        return (s > EPS) & (t > EPS)
    return (s >= -EPS) & (t >= -EPS)


@dataclass(frozen=True)
class ConvexPolygon:
    """Counter-clockwise vertex list of a convex polygon."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = as_points(self.vertices)
        object.__setattr__(self, "vertices", verts)

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3 or self.area() <= EPS

    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        return 0.5 * float(np.sum(cross(v, np.roll(v, -1, axis=0))))

    def edge_crosses(self, x) -> np.ndarray:
        """cross(q - p, x - p) for every edge p -> q; shape (..., n_edges)."""
        v = self.vertices
        x = np.asarray(x, dtype=float)
        p = v
        d = np.roll(v, -1, axis=0) - v
        rel = x[..., None, :] - p
        return d[:, 0] * rel[..., 1] - d[:, 1] * rel[..., 0]

    def contains(self, x, strict: bool = True):
        """Strict (open) or closed membership; a degenerate polygon has no interior."""
        x = np.asarray(x, dtype=float)
        if self.degenerate:
            if strict:
                return np.zeros(x.shape[:-1], dtype=bool)
            raise ValueError("closed membership is not defined for a degenerate polygon")
        c = self.edge_crosses(x)
        if strict:
            return np.all(c > EPS, axis=-1)
        return np.all(c >= -EPS, axis=-1)


@dataclass(frozen=True)
class Hull:
    """Convex hull of a finite cloud.

    ``vertex_idx`` lists the extreme points counter-clockwise, ``boundary``
    flags every point lying on the hull boundary, collinear edge points
    included.  A collinear or tiny cloud is ``degenerate``: its interior is
    empty and every point is on the boundary.
    """

    polygon: ConvexPolygon
    vertex_idx: np.ndarray
    boundary: np.ndarray
    degenerate: bool


def _turn(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(pts: np.ndarray, order) -> list[int]:
    """Andrew's monotone chain over ``order`` (sorted by x, then y); exact strict turns only.

    Near-collinear points are resolved later by the tolerant polygon test;
    a tolerance here would drop vertices of needle-thin hulls.
    """
    order = list(order)
    xy = pts[order].tolist()
    lower: list[int] = []
    for i in range(len(order)):
        p = xy[i]
        while len(lower) >= 2 and _turn(xy[lower[-2]], xy[lower[-1]], p) <= 0.0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in range(len(order) - 1, -1, -1):
        p = xy[i]
        while len(upper) >= 2 and _turn(xy[upper[-2]], xy[upper[-1]], p) <= 0.0:
            upper.pop()
        upper.append(i)
    return [order[i] for i in lower[:-1] + upper[:-1]]


def _beyond_none(a, b, eps=EPS):
    """For a sorted ascending: True where no point has a' > a+eps and b' > b+eps."""
    n = len(a)
    if n == 0:
        return np.zeros(0, dtype=bool)
    smax = np.empty(n + 1)
    smax[:n] = np.maximum.accumulate(b[::-1])[::-1]
    smax[n] = -np.inf
    if n == 1 or np.min(np.diff(a)) > eps:
        # no near-ties in a: the strictly larger ones are exactly the later entries
        return smax[1:] <= b + eps
    idx = np.searchsorted(a, a + eps, side="right")
    return smax[idx] <= b + eps


def quadrant_maxima(pts: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Points with an empty open quadrant in at least one of the four directions.

    ``order`` sorts ``pts`` by first coordinate.  Every point on the boundary
    of the convex hull is among them, so the hull only has to be built from
    this (usually small) subset.
    """
    x = pts[order, 0]
    y = pts[order, 1]
    rx = -x[::-1]
    ry = y[::-1]
    hit = _beyond_none(x, y) | _beyond_none(x, -y)
    hit |= (_beyond_none(rx, ry) | _beyond_none(rx, -ry))[::-1]
    return order[hit]


def convex_hull(points) -> Hull:
    pts = as_points(points)
    n = len(pts)
    boundary = np.zeros(n, dtype=bool)
    if n == 0:
        return Hull(ConvexPolygon(np.zeros((0, 2))), np.zeros(0, dtype=int), boundary, True)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    cand = quadrant_maxima(pts, order)
    cand = cand[np.lexsort((pts[cand, 1], pts[cand, 0]))]
    vidx = np.asarray(_monotone_chain(pts, list(cand)) if len(cand) >= 3 else cand, dtype=int)
    poly = ConvexPolygon(pts[vidx])
    if len(vidx) < 3 or poly.area() <= EPS:
        # collinear cloud: no interior, everything is boundary
        boundary[:] = True
        return Hull(poly, vidx, boundary, True)
    boundary[cand] = ~poly.contains(pts[cand], strict=True)
    return Hull(poly, vidx, boundary, False)


def hull_interior(points, x) -> np.ndarray:
    """Whether x lies in the open convex hull of ``points``."""
    hull = convex_hull(points)
    x = np.asarray(x, dtype=float)
    if hull.degenerate:
        return np.zeros(x.shape[:-1], dtype=bool)
    return hull.polygon.contains(x, strict=True)


def brute_force_hull_boundary(points) -> np.ndarray:
    """O(n^3) oracle: a point is interior iff it lies strictly inside some triangle.

    In the plane (Caratheodory) a point is in the open hull of a finite set
    iff it is in the open hull of at most 4 of its points, but open
    triangles miss points on a diagonal of a quadrilateral; those are
    caught by also testing pairs of triangles sharing an edge that contains
    the point.
    """
    pts = as_points(points)
    n = len(pts)
    inside = np.zeros(n, dtype=bool)
    for i, j, k in combinations(range(n), 3):
        a, b, c = pts[i], pts[j], pts[k]
        area = _turn(a, b, c)
        if abs(area) <= EPS:
            continue
        if area < 0:
            b, c = c, b
        tri = np.array([a, b, c])
        inside |= ConvexPolygon(tri).contains(pts, strict=True)
    # points on a segment between two points that also has hull points strictly on both sides
    for i, j in combinations(range(n), 2):
        a, b = pts[i], pts[j]
        d = b - a
        rel = pts - a
        side = d[0] * rel[:, 1] - d[1] * rel[:, 0]
        if not (np.any(side > EPS) and np.any(side < -EPS)):
            continue
        t = rel @ d / (d @ d)
        on = (np.abs(side) <= EPS) & (t > EPS) & (t < 1 - EPS)
        inside |= on
    return ~inside
