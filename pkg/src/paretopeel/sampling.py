"""Domains, intensities, Poisson sampling, and the boundary probe.

Randomness comes from numpy's Philox counter-based generator.  The key
is derived with ``SeedSequence([seed, replica])``, so every (seed,
replica) pair owns an independent stream and the result never depends
on how work is scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .geometry import EPS, ConvexPolygon, as_points, cross
from .hull import pareto_membership
from .norm import NormModel

MAX_REJECTIONS = 1_000_000


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("rectangle needs x0 < x1 and y0 < y1")

    @property
    def bbox(self):
        return (self.x0, self.x1, self.y0, self.y1)

    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return ((x[..., 0] > self.x0) & (x[..., 0] < self.x1)
                & (x[..., 1] > self.y0) & (x[..., 1] < self.y1))

    def boundary_samples(self, resolution: int) -> np.ndarray:
        return ConvexPolygonShape(self.corners()).boundary_samples(resolution)

    def corners(self) -> np.ndarray:
        return np.array([[self.x0, self.y0], [self.x1, self.y0],
                         [self.x1, self.y1], [self.x0, self.y1]])

    def to_spec(self) -> dict:
        return {"type": "rectangle", "bounds": [self.x0, self.x1, self.y0, self.y1]}


@dataclass(frozen=True)
class ConvexPolygonShape:
    vertices: np.ndarray

    def __post_init__(self):
        poly = ConvexPolygon(self.vertices)
        v = poly.vertices
        if poly.degenerate:
            raise ValueError("polygon domain is degenerate")
        turns = cross(np.roll(v, -1, 0) - v, np.roll(v, -2, 0) - np.roll(v, -1, 0))
        if np.any(turns <= EPS):
            raise ValueError("polygon domain must be strictly convex and counter-clockwise")
        object.__setattr__(self, "vertices", v)

    @property
    def bbox(self):
        v = self.vertices
        return (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())

    def area(self) -> float:
        return ConvexPolygon(self.vertices).area()

    def contains(self, x):
        return ConvexPolygon(self.vertices).contains(x, strict=True)

    def boundary_samples(self, resolution: int) -> np.ndarray:
        v = self.vertices
        x0, x1, y0, y1 = self.bbox
        h = max(x1 - x0, y1 - y0) / resolution
        out = []
        for a, b in zip(v, np.roll(v, -1, 0)):
            k = max(1, int(math.ceil(np.linalg.norm(b - a) / h)))
            t = np.arange(k) / k
            out.append(a + t[:, None] * (b - a))
        return np.concatenate(out)

    def to_spec(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class RectilinearUnion:
    rects: tuple

    def __post_init__(self):
        rs = tuple(r if isinstance(r, Rectangle) else Rectangle(*r) for r in self.rects)
        if not rs:
            raise ValueError("rectilinear union needs at least one rectangle")
        object.__setattr__(self, "rects", rs)
        if not self._connected():
            raise ValueError("rectilinear union must be connected")

    def _connected(self) -> bool:
        rs = self.rects
        n = len(rs)

        def touch(a, b):
            # open overlap or a shared edge of positive length
            ox = min(a.x1, b.x1) - max(a.x0, b.x0)
            oy = min(a.y1, b.y1) - max(a.y0, b.y0)
            return (ox > 0 and oy >= 0) or (ox >= 0 and oy > 0)

        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j not in seen and touch(rs[i], rs[j]):
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n

    @property
    def bbox(self):
        return (min(r.x0 for r in self.rects), max(r.x1 for r in self.rects),
                min(r.y0 for r in self.rects), max(r.y1 for r in self.rects))

    def area(self) -> float:
        xs = sorted({c for r in self.rects for c in (r.x0, r.x1)})
        ys = sorted({c for r in self.rects for c in (r.y0, r.y1)})
        total = 0.0
        for xa, xb in zip(xs, xs[1:]):
            for ya, yb in zip(ys, ys[1:]):
                mid = np.array([(xa + xb) / 2, (ya + yb) / 2])
                if any(r.contains(mid) for r in self.rects):
                    total += (xb - xa) * (yb - ya)
        return total

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=bool)
        for r in self.rects:
            out |= r.contains(x)
        # points on an internal shared edge are interior to the union
        h = 1e-9
        shifted = np.ones(x.shape[:-1], dtype=bool)
        for dx, dy in ((h, h), (-h, h), (h, -h), (-h, -h)):
            y = x + np.array([dx, dy])
            hit = np.zeros(x.shape[:-1], dtype=bool)
            for r in self.rects:
                hit |= r.contains(y)
            shifted &= hit
        return out | shifted

    def boundary_samples(self, resolution: int) -> np.ndarray:
        x0, x1, y0, y1 = self.bbox
        h = max(x1 - x0, y1 - y0) / resolution
        cand = np.concatenate([r.boundary_samples(max(4, int(resolution))) for r in self.rects])
        keep = ~self.contains(cand)
        pts = cand[keep]
        # drop near-duplicates from shared corners
        if len(pts):
            pts = np.unique(np.round(pts / (h * 1e-6)) * (h * 1e-6), axis=0)
        return pts

    def to_spec(self) -> dict:
        return {"type": "rectilinear", "rectangles": [list(r.bbox) for r in self.rects]}


Domain = Rectangle | ConvexPolygonShape | RectilinearUnion


def domain_from_spec(spec) -> Domain:
    if isinstance(spec, (Rectangle, ConvexPolygonShape, RectilinearUnion)):
        return spec
    if isinstance(spec, str):
        if spec == "square":
            return Rectangle(-1.0, 1.0, -1.0, 1.0)
        if spec == "unit-square":
            return Rectangle(0.0, 1.0, 0.0, 1.0)
        raise ValueError(f"unknown domain preset {spec!r}")
    kind = spec.get("type")
    keys = set(spec) - {"type"}
    if kind == "rectangle" and keys == {"bounds"}:
        return Rectangle(*map(float, spec["bounds"]))
    if kind == "polygon" and keys == {"vertices"}:
        return ConvexPolygonShape(np.asarray(spec["vertices"], dtype=float))
    if kind == "rectilinear" and keys == {"rectangles"}:
        return RectilinearUnion(tuple(Rectangle(*map(float, r)) for r in spec["rectangles"]))
    raise ValueError(f"bad domain spec: {spec!r}")


def regular_polygon(k: int, radius: float = 1.0) -> ConvexPolygonShape:
    t = 2 * math.pi * np.arange(k) / k
    return ConvexPolygonShape(radius * np.column_stack([np.cos(t), np.sin(t)]))


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError("intensity must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], float(self.value))

    def max(self) -> float:
        return float(self.value)

    def integral(self, d: Domain) -> float:
        return float(self.value) * d.area()

    def to_spec(self) -> dict:
        return {"type": "constant", "value": self.value}


@dataclass(frozen=True)
class BilinearGrid:
    """Bilinear interpolation of ``values[i, j]`` at (xs[i], ys[j]) over the box (x0, x1, y0, y1)."""

    box: tuple
    values: np.ndarray
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or min(vals.shape) < 2:
            raise ValueError("bilinear intensity needs at least a 2x2 grid")
        if not np.all(np.isfinite(vals)) or vals.min() <= 0:
            raise ValueError("intensity must be positive and finite")
        x0, x1, y0, y1 = map(float, self.box)
        xs = np.linspace(x0, x1, vals.shape[0])
        ys = np.linspace(y0, y1, vals.shape[1])
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_interp", RegularGridInterpolator(
            (xs, ys), vals, method="linear", bounds_error=False, fill_value=None))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x0, x1, y0, y1 = map(float, self.box)
        y = np.stack([np.clip(x[..., 0], x0, x1), np.clip(x[..., 1], y0, y1)], axis=-1)
        return self._interp(y.reshape(-1, 2)).reshape(x.shape[:-1])

    def max(self) -> float:
        # bilinear pieces attain their max at grid nodes
        return float(self.values.max())

    def integral(self, d: Domain, resolution: int = 1024) -> float:
        x0, x1, y0, y1 = d.bbox
        gx = x0 + (np.arange(resolution) + 0.5) * (x1 - x0) / resolution
        gy = y0 + (np.arange(resolution) + 0.5) * (y1 - y0) / resolution
        X, Y = np.meshgrid(gx, gy, indexing="ij")
        pts = np.stack([X, Y], axis=-1)
        vals = np.where(d.contains(pts), self(pts), 0.0)
        return float(vals.sum() * (x1 - x0) * (y1 - y0) / resolution**2)

    def to_spec(self) -> dict:
        return {"type": "bilinear", "box": list(self.box), "values": self.values.tolist()}


Intensity = Constant | BilinearGrid


def intensity_from_spec(spec) -> Intensity:
    if isinstance(spec, (Constant, BilinearGrid)):
        return spec
    if isinstance(spec, (int, float)):
        return Constant(float(spec))
    kind = spec.get("type")
    keys = set(spec) - {"type"}
    if kind == "constant" and keys <= {"value"}:
        return Constant(float(spec.get("value", 1.0)))
    if kind == "bilinear" and keys == {"box", "values"}:
        return BilinearGrid(tuple(spec["box"]), np.asarray(spec["values"], dtype=float))
    raise ValueError(f"bad intensity spec: {spec!r}")


def make_rng(seed: int, replica: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replica)])))


def sample_poisson(d: Domain, f: Intensity, n: float, seed: int, replica: int = 0) -> np.ndarray:
    """Poisson cloud with intensity n*f on the open domain d.

    The count is Poisson(n * integral of f); positions are drawn by
    rejection from the bounding box against the domain and f/max(f).
    Coordinates coinciding with an earlier point are redrawn, so the
    cloud is always distinct.
    """
    if not (n > 0 and math.isfinite(n)):
        raise ValueError("n must be positive and finite")
    rng = make_rng(seed, replica)
    count = int(rng.poisson(n * f.integral(d)))
    x0, x1, y0, y1 = d.bbox
    fmax = f.max()
    out = np.empty((0, 2))
    misses = 0
    while len(out) < count:
        need = count - len(out)
        batch = max(1024, int(need * 1.5) + 64)
        cand = np.column_stack([rng.uniform(x0, x1, batch), rng.uniform(y0, y1, batch)])
        u = rng.uniform(0.0, 1.0, batch)
        ok = d.contains(cand) & (u * fmax < f(cand))
        hits = np.flatnonzero(ok)
        if len(hits) == 0:
            misses += batch
        else:
            longest = max(misses + hits[0], int(np.max(np.diff(hits), initial=1)) - 1)
            if longest >= MAX_REJECTIONS:
                break
            misses = batch - 1 - hits[-1]
        if misses >= MAX_REJECTIONS:
            break
        out = np.concatenate([out, cand[hits[:need]]])
        out = _drop_collisions(out)
    if len(out) < count:
        raise SamplingError(f"{MAX_REJECTIONS} consecutive rejections; domain or intensity too thin")
    return out


def _drop_collisions(pts: np.ndarray) -> np.ndarray:
    _, first = np.unique(pts, axis=0, return_index=True)
    if len(first) == len(pts):
        return pts
    return pts[np.sort(first)]


@dataclass(frozen=True)
class ProbeReport:
    boundary: np.ndarray
    compatible: np.ndarray  # some flat cone at the point meets the sampled closure only on the boundary
    efficient: np.ndarray  # the point is not interior to the hull of the sampled closure
    resolution: int

    @property
    def all_pass(self) -> bool:
        return bool(self.compatible.all() and self.efficient.all())

    def flagged(self) -> np.ndarray:
        return self.boundary[~(self.compatible & self.efficient)]


def domain_efficiency_probe(d: Domain, m: NormModel, resolution: int = 32) -> ProbeReport:
    """Discretised check of the boundary conditions that make the continuum limit well posed.

    Necessary-condition style: a failure is meaningful, a pass only holds
    at this resolution.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    bd = as_points(d.boundary_samples(resolution))
    x0, x1, y0, y1 = d.bbox
    gx = np.linspace(x0, x1, resolution + 1)
    gy = np.linspace(y0, y1, resolution + 1)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    grid = np.column_stack([X.ravel(), Y.ravel()])
    interior = grid[d.contains(grid)]
    closure = np.concatenate([bd, interior])
    compatible = np.zeros(len(bd), dtype=bool)
    efficient = np.zeros(len(bd), dtype=bool)
    for i, x in enumerate(bd):
        rel = interior - x
        for f in m.facets:
            c = f.flat
            s = rel @ np.array([-c.w[1], c.w[0]])  # w x rel
            t = rel @ np.array([c.v[1], -c.v[0]])  # rel x v
            if not np.any((s >= -EPS) & (t >= -EPS)):
                compatible[i] = True
                break
        if not m.facets:
            compatible[i] = True
        others = closure[np.any(closure != x, axis=1)]
        efficient[i] = not pareto_membership(others, x, m).interior
    return ProbeReport(bd, compatible, efficient, resolution)
