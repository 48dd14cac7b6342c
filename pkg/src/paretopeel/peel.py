"""Pareto peeling, its height function, and the two classical peelings it is compared with.

The peeling engine works per facet cone.  In the unnormalised cone
coordinates (x cross v, w cross x) the open flat cone at a point becomes
the open upper-right quadrant, so a survivor fails the cone test exactly
when it is a strict maximum of the survivors in that coordinate order.
Each cone keeps its survivors sorted once; a round is then a suffix
maximum plus a binary search per cone.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .geometry import EPS, ConvexPolygon, _beyond_none, _monotone_chain, as_points, quadrant_maxima
from .hull import pareto_membership
from .norm import NormModel

HULL = -1
EXTERIOR = -2  # reserved, see reason_label


@dataclass
class PeelResult:
    layer: np.ndarray
    reason: np.ndarray  # facet index >= 0, HULL, or EXTERIOR
    layers: int
    kind: str = "pareto"
    hulls: list = field(default_factory=list)  # survivor hull per round, when tracked
    rects: np.ndarray | None = None  # weak peeling: bounding rectangle per round

    def reason_label(self, i: int) -> str:
        r = int(self.reason[i])
        if r >= 0:
            return f"facet:{r}"
        return "convex-hull" if r == HULL else "initial-exterior"

    def survivors(self, k: int) -> np.ndarray:
        """Mask of the points still present at the start of round k."""
        return self.layer >= k


def _cone_coords(A: np.ndarray, f) -> tuple[np.ndarray, np.ndarray]:
    v, w = f.v, f.w
    al = A[:, 0] * v[1] - A[:, 1] * v[0]
    be = w[0] * A[:, 1] - w[1] * A[:, 0]
    return al, be


def _hull_boundary(A: np.ndarray, order: np.ndarray):
    """Boundary points of conv(A[order]) and the hull polygon (order sorted by x, then y)."""
    if len(order) < 3:
        return order, A[order]
    cand = quadrant_maxima(A, order)
    cand = cand[np.lexsort((A[cand, 1], A[cand, 0]))]
    verts = _monotone_chain(A, list(cand)) if len(cand) >= 3 else list(cand)
    poly = ConvexPolygon(A[verts])
    if poly.degenerate:
        return order, poly.vertices
    return cand[~poly.contains(A[cand], strict=True)], poly.vertices


def peel(A, m: NormModel, eps: float = EPS) -> PeelResult:
    """Pareto-peel a finite cloud of distinct points.

    Round k removes every survivor that is not interior to the Pareto
    hull of the round's survivors; removed points get layer k.
    """
    A = as_points(A, distinct=True)
    n = len(A)
    layer = np.full(n, -1, dtype=np.int64)
    reason = np.full(n, EXTERIOR, dtype=np.int64)
    cones = []
    for f in m.facets:
        al, be = _cone_coords(A, f)
        cones.append([np.argsort(al, kind="stable"), al, be])
    track_hull = bool(m.arcs)
    ordx = np.lexsort((A[:, 1], A[:, 0])) if track_hull else None
    hulls = []
    alive = np.ones(n, dtype=bool)
    remaining = n
    k = 0
    while remaining:
        out = np.zeros(n, dtype=bool)
        code = np.full(n, EXTERIOR, dtype=np.int64)
        for i, entry in enumerate(cones):
            order, al, be = entry
            order = order[alive[order]]
            entry[0] = order
            top = order[_beyond_none(al[order], be[order], eps)]
            fresh = top[~out[top]]
            code[fresh] = i
            out[top] = True
        if track_hull:
            ordx = ordx[alive[ordx]]
            bd, poly = _hull_boundary(A, ordx)
            hulls.append(poly)
            fresh = bd[~out[bd]]
            code[fresh] = HULL
            out[bd] = True
        idx = np.flatnonzero(out)
        layer[idx] = k
        reason[idx] = code[idx]
        alive[idx] = False
        remaining -= len(idx)
        k += 1
    return PeelResult(layer, reason, k, "pareto", hulls)


def convex_peel(A) -> PeelResult:
    """Onion peeling: each round strips every point on the boundary of the convex hull.

    The hull itself comes from qhull, run on the points that have an
    empty open quadrant (a superset of the hull boundary).  Points on hull
    edges are found from the facet equations.
    """
    A = as_points(A, distinct=True)
    n = len(A)
    layer = np.full(n, -1, dtype=np.int64)
    order = np.lexsort((A[:, 1], A[:, 0]))
    hulls = []
    k = 0
    while len(order):
        cand = quadrant_maxima(A, order)
        pts = A[cand]
        try:
            h = ConvexHull(pts)
        except (QhullError, ValueError):
            bd = order  # collinear or too few points: no interior
            hulls.append(pts)
        else:
            slack = pts @ h.equations[:, :2].T + h.equations[:, 2]
            bd = cand[np.max(slack, axis=1) >= -EPS]
            hulls.append(pts[h.vertices])
        layer[bd] = k
        order = order[layer[order] < 0]
        k += 1
    reason = np.full(n, HULL, dtype=np.int64)
    return PeelResult(layer, reason, k, "convex", hulls)


def weak_l1_peel(A, eps: float = 0.0) -> PeelResult:
    """Each round removes the survivors attaining the min or max of either coordinate."""
    A = as_points(A, distinct=True)
    n = len(A)
    layer = np.full(n, -1, dtype=np.int64)
    reason = np.full(n, EXTERIOR, dtype=np.int64)
    ox = np.argsort(A[:, 0], kind="stable").tolist()
    oy = np.argsort(A[:, 1], kind="stable").tolist()
    xs = A[:, 0].tolist()
    ys = A[:, 1].tolist()
    alive = [True] * n
    lo_x, hi_x, lo_y, hi_y = 0, n - 1, 0, n - 1
    rects = []
    remaining = n
    k = 0
    while remaining:
        while not alive[ox[lo_x]]:
            lo_x += 1
        while not alive[ox[hi_x]]:
            hi_x -= 1
        while not alive[oy[lo_y]]:
            lo_y += 1
        while not alive[oy[hi_y]]:
            hi_y -= 1
        x0, x1 = xs[ox[lo_x]], xs[ox[hi_x]]
        y0, y1 = ys[oy[lo_y]], ys[oy[hi_y]]
        rects.append((x0, x1, y0, y1))
        hit: list[tuple[int, int]] = []
        # side codes: 0 max x1, 1 max x2, 2 min x1, 3 min x2
        j = hi_x
        while j >= lo_x and xs[ox[j]] >= x1 - eps:
            hit.append((ox[j], 0))
            j -= 1
        j = hi_y
        while j >= lo_y and ys[oy[j]] >= y1 - eps:
            hit.append((oy[j], 1))
            j -= 1
        j = lo_x
        while j <= hi_x and xs[ox[j]] <= x0 + eps:
            hit.append((ox[j], 2))
            j += 1
        j = lo_y
        while j <= hi_y and ys[oy[j]] <= y0 + eps:
            hit.append((oy[j], 3))
            j += 1
        for i, side in hit:
            if alive[i]:
                alive[i] = False
                layer[i] = k
                reason[i] = side
                remaining -= 1
        k += 1
    return PeelResult(layer, reason, k, "weak-l1", rects=np.array(rects).reshape(-1, 4))


def _interior_at(pr: PeelResult, A, m, x, k: int) -> bool:
    """Is x interior to the hull of the survivors A_{k-1}?"""
    S = A[pr.layer >= k - 1]
    if pr.kind == "weak-l1":
        x0, x1, y0, y1 = pr.rects[k - 1]
        return x0 < x[0] < x1 and y0 < x[1] < y1
    if pr.kind == "convex":
        from .geometry import hull_interior
        return bool(hull_interior(S, x))
    return pareto_membership(S, x, m).interior


def height_at(pr: PeelResult, A, m: NormModel | None, x) -> int:
    """Number of peeling rounds whose hull contains x in its interior.

    Binary search over k, using that the hulls are nested.
    """
    A = as_points(A)
    x = np.asarray(x, dtype=float)
    lo, hi = 0, pr.layers  # predicate true at lo (vacuously for 0), unknown above
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _interior_at(pr, A, m, x, mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def _cone_max(al, be, vals, qa, qb, eps):
    """For each query: max of vals over points with al > qa+eps and be > qb+eps (0 if none)."""
    order = np.argsort(al, kind="stable")
    al, be, vals = al[order], be[order], vals[order]
    start = np.searchsorted(al, qa + eps, side="right")
    out = np.zeros(len(qa), dtype=np.int64)
    for i in range(len(qa)):
        s = start[i]
        if s == len(al):
            continue
        sel = be[s:] > qb[i] + eps
        if sel.any():
            out[i] = vals[s:][sel].max()
    return out


def _hull_depth(hulls, xs) -> np.ndarray:
    out = np.zeros(len(xs), dtype=np.int64)
    active = np.arange(len(xs))
    for poly in hulls:
        if len(active) == 0:
            break
        P = ConvexPolygon(poly)
        inside = P.contains(xs[active], strict=True)
        active = active[inside]
        out[active] += 1
    return out


def height_field(pr: PeelResult, A, m: NormModel | None, xs, eps: float = EPS) -> np.ndarray:
    """Height at many locations at once.

    For a point x the height is the minimum over flat cones of
    1 + max layer of the points in x + int(Q_p) (0 when that cone is
    empty), further capped by the number of nested survivor hulls
    containing x when the norm has round pieces.
    """
    A = as_points(A)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if pr.kind == "weak-l1":
        r = pr.rects
        inside = ((r[None, :, 0] < xs[:, None, 0]) & (xs[:, None, 0] < r[None, :, 1])
                  & (r[None, :, 2] < xs[:, None, 1]) & (xs[:, None, 1] < r[None, :, 3]))
        return inside.sum(axis=1)
    if pr.kind == "convex":
        return _hull_depth(pr.hulls, xs)
    best = np.full(len(xs), pr.layers, dtype=np.int64)
    for f in m.facets:
        al, be = _cone_coords(A, f)
        qa, qb = _cone_coords(xs, f)
        best = np.minimum(best, _cone_max(al, be, pr.layer + 1, qa, qb, eps))
    if m.arcs:
        best = np.minimum(best, _hull_depth(pr.hulls, xs))
    return best


def dpp_check(pr: PeelResult, A, m: NormModel, eps: float = EPS) -> int:
    """Largest disagreement between each layer and the cone recursion evaluated at its point.

    Only defined for polyhedral norms, where the recursion restricted to
    points of A is exact.
    """
    if not m.polyhedral:
        raise ValueError("the restricted recursion is only exact for polyhedral norms")
    A = as_points(A)
    pred = np.full(len(A), np.iinfo(np.int64).max, dtype=np.int64)
    for f in m.facets:
        al, be = _cone_coords(A, f)
        pred = np.minimum(pred, _cone_max(al, be, pr.layer + 1, al, be, eps))
    return int(np.max(np.abs(pred - pr.layer))) if len(A) else 0


def write_peel_csv(path, A, pr: PeelResult) -> None:
    A = as_points(A)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x1", "x2", "layer", "reason"])
        for i in range(len(A)):
            out.writerow([repr(float(A[i, 0])), repr(float(A[i, 1])), int(pr.layer[i]),
                          pr.reason_label(i)])


def read_points_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return as_points([[float(r["x1"]), float(r["x2"])] for r in rows])
