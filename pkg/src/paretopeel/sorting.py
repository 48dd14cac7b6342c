"""Longest chains and nondominated-sorting depth under strict coordinatewise order."""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .geometry import EPS, Cone2, as_points


@dataclass(frozen=True)
class DepthResult:
    depth: np.ndarray  # >= 1: longest strict chain ending at the point, point included

    @property
    def max_depth(self) -> int:
        return int(self.depth.max()) if len(self.depth) else 0


def _patience_ranks(A: np.ndarray) -> np.ndarray:
    # x1 ascending, ties by x2 descending, so equal-x1 points never chain
    order = np.lexsort((-A[:, 1], A[:, 0]))
    tails: list[float] = []
    rank = np.empty(len(A), dtype=np.int64)
    ys = A[order, 1].tolist()
    for pos, y in zip(order.tolist(), ys):
        k = bisect_left(tails, y)
        if k == len(tails):
            tails.append(y)
        else:
            tails[k] = y
        rank[pos] = k
    return rank


def longest_chain(A) -> int:
    """Length of the longest chain a1 < a2 < ... with both coordinates strictly increasing."""
    A = as_points(A)
    if len(A) == 0:
        return 0
    return int(_patience_ranks(A).max()) + 1


def nds_depth(A) -> DepthResult:
    """Per-point depth: one plus the longest strict chain strictly below the point."""
    A = as_points(A)
    if len(A) == 0:
        return DepthResult(np.zeros(0, dtype=np.int64))
    return DepthResult(_patience_ranks(A) + 1)


def depth_at(A, xs, depth: DepthResult | None = None) -> np.ndarray:
    """Depth function at arbitrary locations: longest chain of A inside (-inf, x)^2."""
    A = as_points(A)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if depth is None:
        depth = nds_depth(A)
    d = depth.depth
    out = np.zeros(len(xs), dtype=np.int64)
    order = np.argsort(A[:, 0], kind="stable")
    ax, ay, ad = A[order, 0], A[order, 1], d[order]
    for i, (x1, x2) in enumerate(xs):
        stop = np.searchsorted(ax, x1, side="left")
        below = ay[:stop] < x2
        if below.any():
            out[i] = ad[:stop][below].max()
    return out


def q_transform(A, cone: Cone2) -> np.ndarray:
    """Coordinates (a, b) with x = a*w + b*v; turns the cone order into coordinatewise order."""
    A = as_points(A)
    det = cone.opening
    if det <= EPS:
        raise ValueError("degenerate cone: w x v must be positive")
    M = np.column_stack([cone.w, cone.v])
    return np.linalg.solve(M, A.T).T


def q_transform_norm(cone: Cone2) -> float:
    """Operator norm of the coordinate map for a cone with unit generators."""
    M = np.column_stack([cone.w, cone.v])
    return float(np.linalg.norm(np.linalg.inv(M), 2))


def depth_dp(A) -> np.ndarray:
    """O(n^2) dynamic program over points sorted by x1; used as the oracle for nds_depth."""
    A = as_points(A)
    n = len(A)
    order = np.argsort(A[:, 0], kind="stable")
    d = np.ones(n, dtype=np.int64)
    for ii in range(n):
        i = order[ii]
        prev = order[:ii]
        less = (A[prev, 0] < A[i, 0]) & (A[prev, 1] < A[i, 1])
        if less.any():
            d[i] = d[prev[less]].max() + 1
    return d
