"""Pareto-hull membership tests.

A point x is interior to the Pareto hull of A when every flat cone
x + int(Q_p) holds a point of A and, for norms with round boundary
pieces, x is also interior to the ordinary convex hull of A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import EPS, as_points, cone_contains, hull_interior
from .norm import FacetCone, NormModel, norm_eval


@dataclass(frozen=True)
class FacetReason:
    index: int
    p: tuple[float, float]


@dataclass(frozen=True)
class RoundReason:
    pass


@dataclass(frozen=True)
class MembershipVerdict:
    interior: bool
    failures: tuple

    def __bool__(self) -> bool:
        return self.interior


def _empty_cone(A: np.ndarray, x: np.ndarray, cone) -> bool:
    return not np.any(cone_contains(cone, A - x, strict=True))


def pareto_membership(A, x, m: NormModel) -> MembershipVerdict:
    A = as_points(A)
    x = np.asarray(x, dtype=float)
    failures: list = []
    for i, f in enumerate(m.facets):
        if _empty_cone(A, x, f.flat):
            failures.append(FacetReason(i, (float(f.p[0]), float(f.p[1]))))
    if m.arcs and not bool(hull_interior(A, x)):
        failures.append(RoundReason())
    return MembershipVerdict(not failures, tuple(failures))


def flattened_membership(A, x, f: FacetCone) -> bool:
    """Membership in the hull for the parallelogram norm with ball conv(+-v, +-w).

    Needs points of A in the four open cones +-Q_p and +-(facet cone).
    Implies membership in the true Pareto hull.
    """
    A = as_points(A)
    x = np.asarray(x, dtype=float)
    d = A - x
    for cone in (f.flat, -f.flat, f.facet_cone, -f.facet_cone):
        if not np.any(cone_contains(cone, d, strict=True)):
            return False
    return True


class OracleVerdict(str, Enum):
    REFUTED = "refuted"
    CONSISTENT = "consistent"
    INCONCLUSIVE = "inconclusive"


def probe_points(x, probes: int, radius: float) -> np.ndarray:
    """Deterministic probes around x: rings at geometric radii plus a square grid."""
    x = np.asarray(x, dtype=float)
    if probes <= 0:
        return np.zeros((0, 2))
    n_grid = int(math.isqrt(probes // 2))
    n_ring = probes - n_grid * n_grid
    rings = max(1, int(round(math.sqrt(n_ring / 8))))
    per_ring = max(1, n_ring // rings)
    radii = radius * np.geomspace(1e-3, 1.0, rings)
    ang = 2 * math.pi * (np.arange(per_ring) + 0.5) / per_ring
    circ = np.column_stack([np.cos(ang), np.sin(ang)])
    pts = [x + r * circ for r in radii]
    if n_grid > 0:
        g = np.linspace(-radius, radius, n_grid)
        gx, gy = np.meshgrid(g, g)
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        pts.append(x + grid[np.any(grid != 0, axis=1)])
    return np.concatenate(pts)[:probes]


def sampled_definition_oracle(A, x, m: NormModel, probes: int = 1000,
                              radius: float = 1.0) -> OracleVerdict:
    """Check interiority against the defining inequality on sampled competitors.

    x is refuted if some probe y != x is at least as close as x to every
    point of A.  Without probes nothing can be said.
    """
    A = as_points(A)
    x = np.asarray(x, dtype=float)
    ys = probe_points(x, probes, radius)
    if len(ys) == 0:
        return OracleVerdict.INCONCLUSIVE
    base = norm_eval(m, A - x)  # (n,)
    for start in range(0, len(ys), 256):
        chunk = ys[start:start + 256]
        dist = norm_eval(m, A[None, :, :] - chunk[:, None, :])  # (k, n)
        if np.any(np.all(dist <= base, axis=1)):
            return OracleVerdict.REFUTED
    return OracleVerdict.CONSISTENT


def brute_force_interior(A, x, m: NormModel, eps: float = EPS) -> bool:
    """Membership by direct cone scans without the facet bookkeeping (test oracle).

    Tests every flat cone through explicit solves of x + a*w + b*v = y.
    """
    A = as_points(A)
    x = np.asarray(x, dtype=float)
    for f in m.facets:
        M = np.column_stack([f.w, f.v])
        ab = np.linalg.solve(M, (A - x).T).T
        if not np.any((ab[:, 0] * f.opening > eps) & (ab[:, 1] * f.opening > eps)):
            return False
    if m.arcs:
        d = A - x
        d = d[np.hypot(d[:, 0], d[:, 1]) > 0]
        if len(d) < 3:
            return False
        ang = np.sort(np.arctan2(d[:, 1], d[:, 0]))
        gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * math.pi]))
        if gaps.max() >= math.pi - 1e-12:
            return False
    return True
