"""Symmetric planar norms built from linear functionals and a Euclidean term.

The unit ball is

    {x : |<a_i, x>| <= 1 for all i} intersected with {x : c*|x| <= 1}.

Its boundary splits into flat facets (one per surviving functional sign)
and circular arcs.  Each facet yields a :class:`FacetCone`, and these
carry everything peeling needs: the facet cone spanned by the facet
endpoints, the flat cone used for membership tests, and the dual basis.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import EPS, Cone2, cross, perp

MIN_FACET = 1e-9
MIN_ARC = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FacetCone:
    """One facet of the unit sphere.

    ``p`` is the outward functional of the facet, scaled to dual norm one,
    and ``e0``/``e1`` its endpoints in counter-clockwise order.  With
    ``v = e0/|e0|`` and ``w = -e1/|e1|`` the facet cone is cone(v, -w)
    and the flat cone is cone(w, v).
    """

    p: np.ndarray
    e0: np.ndarray
    e1: np.ndarray
    v: np.ndarray
    w: np.ndarray
    v_star: np.ndarray
    w_star: np.ndarray

    @property
    def opening(self) -> float:
        """w x v, which is positive."""
        return float(cross(self.w, self.v))

    @property
    def flat(self) -> Cone2:
        return Cone2(self.w, self.v)

    @property
    def facet_cone(self) -> Cone2:
        return Cone2(self.v, -self.w)

    def term(self, xi) -> np.ndarray:
        """<xi, v><xi, w> / |v x w| for an array of covectors."""
        xi = np.asarray(xi, dtype=float)
        return (xi @ self.v) * (xi @ self.w) / abs(self.opening)


def _facet_cone(p, e0, e1) -> FacetCone:
    v = e0 / np.linalg.norm(e0)
    w = -e1 / np.linalg.norm(e1)
    basis = np.column_stack([v, w])
    dual = np.linalg.inv(basis)
    return FacetCone(p=np.asarray(p, float), e0=e0, e1=e1, v=v, w=w,
                     v_star=dual[0], w_star=dual[1])


@dataclass(frozen=True)
class NormModel:
    functionals: np.ndarray
    euclidean_weight: float
    facets: tuple[FacetCone, ...]
    arcs: tuple[tuple[float, float], ...] = field(default=())
    name: str = "custom"

    @property
    def polyhedral(self) -> bool:
        return len(self.arcs) == 0

    @property
    def strictly_convex(self) -> bool:
        return len(self.facets) == 0

    @property
    def dual_corners(self) -> np.ndarray:
        """The set of facet functionals (corners of the dual ball)."""
        return np.array([f.p for f in self.facets]).reshape(-1, 2)

    def __call__(self, x):
        return norm_eval(self, x)

    def to_spec(self) -> dict:
        return {"functionals": self.functionals.tolist(),
                "euclidean_weight": self.euclidean_weight}


def _dedupe(functionals: np.ndarray) -> np.ndarray:
    out: list[np.ndarray] = []
    for a in functionals:
        if np.linalg.norm(a) <= EPS:
            continue
        # canonical sign: first nonzero coordinate positive
        if a[0] < -EPS or (abs(a[0]) <= EPS and a[1] < 0):
            a = -a
        if not any(np.allclose(a, b, rtol=0, atol=1e-12) for b in out):
            out.append(a)
    return np.array(out).reshape(-1, 2)


def _arc_pieces(functionals, c) -> list[tuple[float, float]]:
    """Arcs of the circle |x| = 1/c not cut off by any functional."""
    if c <= 0:
        return []
    radius = 1.0 / c
    cuts: list[tuple[float, float]] = []
    for a in functionals:
        for s in (a, -a):
            r = radius * np.linalg.norm(s)
            if r <= 1.0 + EPS:
                continue
            half = math.acos(1.0 / r)
            mid = math.atan2(s[1], s[0])
            cuts.append((mid - half, mid + half))
    if not cuts:
        return [(0.0, TWO_PI)]
    # normalise to [0, 2pi), splitting intervals that wrap around
    flat: list[tuple[float, float]] = []
    for lo, hi in cuts:
        span = hi - lo
        lo %= TWO_PI
        if lo + span > TWO_PI:
            flat += [(lo, TWO_PI), (0.0, lo + span - TWO_PI)]
        else:
            flat.append((lo, lo + span))
    flat.sort()
    merged: list[list[float]] = []
    for lo, hi in flat:
        if merged and lo <= merged[-1][1] + EPS:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    gaps: list[tuple[float, float]] = []
    prev = merged[-1][1] - TWO_PI
    for lo, hi in merged:
        if lo - prev > MIN_ARC:
            gaps.append((prev % TWO_PI, prev % TWO_PI + (lo - prev)))
        prev = hi
    return gaps


def build_norm(functionals, euclidean_weight: float = 0.0, name: str = "custom") -> NormModel:
    """Build the norm max(max_i |<a_i, x>|, c*|x|).

    Raises ValueError when the ball is unbounded, i.e. c == 0 and the
    functionals do not span the plane.
    """
    c = float(euclidean_weight)
    if not math.isfinite(c) or c < 0:
        raise ValueError("euclidean_weight must be a finite non-negative number")
    fs = np.asarray(functionals, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(fs)):
        raise ValueError("functionals must be finite")
    fs = _dedupe(fs)
    if c == 0 and (len(fs) < 2 or np.linalg.matrix_rank(fs, tol=1e-12) < 2):
        raise ValueError("unit ball is unbounded: functionals must span the plane when c = 0")

    facets: list[FacetCone] = []
    for i, a in enumerate(fs):
        for sign in (1.0, -1.0):
            s = sign * a
            n2 = float(s @ s)
            x0 = s / n2
            d = perp(s) / math.sqrt(n2)  # unit direction along the line, ccw
            lo, hi = -math.inf, math.inf
            for j, b in enumerate(fs):
                if j == i:
                    continue
                # |<b, x0 + t d>| <= 1
                bd = float(b @ d)
                bx = float(b @ x0)
                if abs(bd) <= EPS:
                    if abs(bx) > 1 + EPS:
                        lo, hi = 1.0, 0.0
                    continue
                t1, t2 = (-1 - bx) / bd, (1 - bx) / bd
                lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
            if c > 0:
                rr = 1.0 / c**2 - 1.0 / n2
                if rr <= 0:
                    continue
                r = math.sqrt(rr)
                lo, hi = max(lo, -r), min(hi, r)
            if hi - lo <= MIN_FACET:
                continue
            e0, e1 = x0 + lo * d, x0 + hi * d
            facets.append(_facet_cone(s, e0, e1))

    # order facets counter-clockwise by the angle of their functional
    facets.sort(key=lambda f: math.atan2(f.p[1], f.p[0]) % TWO_PI)
    arcs = _arc_pieces(fs, c)
    return NormModel(functionals=fs, euclidean_weight=c, facets=tuple(facets),
                     arcs=tuple(arcs), name=name)


def norm_eval(m: NormModel, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1])
    if len(m.functionals):
        out = np.max(np.abs(x @ m.functionals.T), axis=-1)
    if m.euclidean_weight > 0:
        out = np.maximum(out, m.euclidean_weight * np.hypot(x[..., 0], x[..., 1]))
    return out


def _in_arc(theta, arc) -> np.ndarray:
    lo, hi = arc
    return ((theta - lo) % TWO_PI) <= (hi - lo) + EPS


def dual_eval(m: NormModel, xi):
    """Dual norm max{<xi, x> : norm(x) <= 1}."""
    xi = np.asarray(xi, dtype=float)
    cands = [xi @ f.e0 for f in m.facets] + [xi @ f.e1 for f in m.facets]
    if m.arcs:
        r = 1.0 / m.euclidean_weight
        theta = np.arctan2(xi[..., 1], xi[..., 0]) % TWO_PI
        length = np.hypot(xi[..., 0], xi[..., 1])
        for arc in m.arcs:
            for ang in arc:
                cands.append(xi @ (r * np.array([math.cos(ang), math.sin(ang)])))
            cands.append(np.where(_in_arc(theta, arc), r * length, -np.inf))
    return np.max(np.stack(cands, axis=-1), axis=-1)


def hamiltonian(m: NormModel, xi):
    """Effective Hamiltonian max(0, max over facets of <xi,v><xi,w>/|v x w|).

    Accepts a single covector or an array of shape (..., 2).
    """
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape[:-1])
    for f in m.facets:
        out = np.maximum(out, f.term(xi))
    return out


def degenerate_direction(m: NormModel, xi) -> np.ndarray:
    return hamiltonian(m, xi) == 0.0


def hamiltonian_bound(f: FacetCone) -> float:
    """tan(theta)/2 with theta = (pi - arcsin(w x v))/2: the facet term is at most
    this times |xi|^2 on the dual cone of the flat cone."""
    theta = 0.5 * (math.pi - math.asin(min(1.0, f.opening)))
    return 0.5 * math.tan(theta)


def kgon_functionals(k: int) -> np.ndarray:
    """Regular k-gon (k even) with vertices at angles 2*pi*j/k."""
    if k < 4 or k % 2:
        raise ValueError("k-gon norms need an even k >= 4")
    ang = (np.arange(k // 2) + 0.5) * TWO_PI / k
    return np.column_stack([np.cos(ang), np.sin(ang)]) / math.cos(math.pi / k)


def kgon_hamiltonian(k: int, xi):
    """Closed form for the regular k-gon, written independently of the facet machinery."""
    xi = np.asarray(xi, dtype=float)
    j = np.arange(k)
    v = np.column_stack([np.cos(TWO_PI * j / k), np.sin(TWO_PI * j / k)])
    w = -np.column_stack([np.cos(TWO_PI * (j + 1) / k), np.sin(TWO_PI * (j + 1) / k)])
    return np.max((xi @ v.T) * (xi @ w.T), axis=-1) / math.sin(TWO_PI / k)


PRESETS = {
    "l1": ([[1.0, 1.0], [1.0, -1.0]], 0.0),
    "linf": ([[1.0, 0.0], [0.0, 1.0]], 0.0),
    "euclidean": ([], 1.0),
    "mixed-example": ([[1.0, -1.0]], 1.0),
    "counterexample": ([[math.sqrt(2.0), 0.0]], 1.0),
}


def preset(name: str) -> NormModel:
    if name.startswith("kgon:"):
        k = int(name.split(":", 1)[1])
        return build_norm(kgon_functionals(k), 0.0, name=name)
    if name not in PRESETS:
        raise ValueError(f"unknown norm preset {name!r}")
    fs, c = PRESETS[name]
    return build_norm(fs, c, name=name)


def norm_from_spec(spec) -> NormModel:
    """Accept a preset name, a JSON string, or a dict with functionals/euclidean_weight."""
    if isinstance(spec, NormModel):
        return spec
    if isinstance(spec, str):
        s = spec.strip()
        if not s.startswith("{"):
            return preset(s)
        spec = json.loads(s)
    if not isinstance(spec, dict):
        raise ValueError("norm spec must be a preset name or an object")
    unknown = set(spec) - {"functionals", "euclidean_weight", "name"}
    if unknown:
        raise ValueError(f"unknown norm spec keys: {sorted(unknown)}")
    return build_norm(spec.get("functionals", []), spec.get("euclidean_weight", 0.0),
                      name=spec.get("name", "custom"))
