"""Closed-form continuum limits, a sweeping solver, and grid diagnostics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from skimage import measure

from .norm import NormModel, hamiltonian, preset
from .sampling import Constant, Rectangle

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ReferenceCase:
    name: str
    norm: str
    domain: tuple  # closed box (x0, x1, y0, y1); infinite entries allowed
    exponent: float  # height ~ n**exponent * reference
    description: str

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x0, x1, y0, y1 = self.domain
        return (x[..., 0] >= x0) & (x[..., 0] <= x1) & (x[..., 1] >= y0) & (x[..., 1] <= y1)


CASES = {
    "l1-quadrant": ReferenceCase("l1-quadrant", "l1", (0.0, math.inf, 0.0, math.inf), 0.5,
                                 "2 sqrt(x1 x2) on the closed positive quadrant"),
    "linf-square": ReferenceCase("linf-square", "linf", (-1.0, 1.0, -1.0, 1.0), 0.5,
                                 "sqrt(2) (1 - max|x_i|)"),
    "counterexample-minimal": ReferenceCase("counterexample-minimal", "counterexample",
                                            (-1.0, 1.0, -1.0, 1.0), 0.5,
                                            "sqrt(2) (1 - |x2|), minimal supersolution"),
    "l1-square": ReferenceCase("l1-square", "l1", (-1.0, 1.0, -1.0, 1.0), 0.5,
                               "2 sqrt((1 - |x1|)(1 - |x2|))"),
    "weak-l1-square": ReferenceCase("weak-l1-square", "l1", (-1.0, 1.0, -1.0, 1.0), 1.0,
                                    "min(1 - x1^2, 1 - x2^2), weak peeling"),
}


def _case(case) -> ReferenceCase:
    if isinstance(case, ReferenceCase):
        return case
    try:
        return CASES[case]
    except KeyError:
        raise ValueError(f"unknown reference case {case!r}") from None


def reference_solution(case, x):
    c = _case(case)
    x = np.asarray(x, dtype=float)
    if not np.all(c.contains(x)):
        raise ValueError(f"point outside the domain of {c.name}")
    a, b = x[..., 0], x[..., 1]
    if c.name == "l1-quadrant":
        out = 2.0 * np.sqrt(a * b)
    elif c.name == "linf-square":
        out = SQRT2 * (1.0 - np.maximum(np.abs(a), np.abs(b)))
    elif c.name == "counterexample-minimal":
        out = SQRT2 * (1.0 - np.abs(b))
    elif c.name == "l1-square":
        out = 2.0 * np.sqrt((1.0 - np.abs(a)) * (1.0 - np.abs(b)))
    else:
        out = np.minimum(1.0 - a * a, 1.0 - b * b)
    return out if out.ndim else float(out)


def reference_gradient(case, x) -> np.ndarray:
    """Analytic gradient at smooth points (one-sided choice on ridges)."""
    c = _case(case)
    x = np.asarray(x, dtype=float)
    a, b = x[..., 0], x[..., 1]
    if c.name == "l1-quadrant":
        g = np.stack([np.sqrt(b / a), np.sqrt(a / b)], axis=-1)
    elif c.name == "linf-square":
        ax = np.abs(a) >= np.abs(b)
        g = np.stack([np.where(ax, -SQRT2 * np.sign(a), 0.0),
                      np.where(ax, 0.0, -SQRT2 * np.sign(b))], axis=-1)
    elif c.name == "counterexample-minimal":
        g = np.stack([np.zeros_like(a), -SQRT2 * np.sign(b)], axis=-1)
    elif c.name == "l1-square":
        sa, sb = 1.0 - np.abs(a), 1.0 - np.abs(b)
        g = np.stack([-np.sign(a) * np.sqrt(sb / sa), -np.sign(b) * np.sqrt(sa / sb)], axis=-1)
    else:
        ax = a * a >= b * b
        g = np.stack([np.where(ax, -2 * a, 0.0), np.where(ax, 0.0, -2 * b)], axis=-1)
    return g


@dataclass
class GridField:
    """Scalar samples on a tensor grid; ``values[i, j]`` sits at (x[i], y[j])."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def bounds(self):
        return (float(self.x[0]), float(self.x[-1]), float(self.y[0]), float(self.y[-1]))

    @property
    def resolution(self):
        return (len(self.x), len(self.y))

    @property
    def h(self) -> tuple[float, float]:
        return (float(self.x[1] - self.x[0]), float(self.y[1] - self.y[0]))

    def nodes(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["x1", "x2", "value"])
            for i, xi in enumerate(self.x):
                for j, yj in enumerate(self.y):
                    out.writerow([repr(float(xi)), repr(float(yj)), repr(float(self.values[i, j]))])

    def contours(self, level: float) -> list[np.ndarray]:
        """Polylines of {value = level} in world coordinates."""
        x0, x1, y0, y1 = self.bounds
        nx, ny = self.resolution
        out = []
        for c in measure.find_contours(self.values, level):
            out.append(np.column_stack([x0 + c[:, 0] * (x1 - x0) / (nx - 1),
                                        y0 + c[:, 1] * (y1 - y0) / (ny - 1)]))
        return out

    def sample(self, pts) -> np.ndarray:
        from scipy.interpolate import RegularGridInterpolator
        interp = RegularGridInterpolator((self.x, self.y), self.values)
        return interp(np.asarray(pts, dtype=float))


def reference_grid(case, resolution: int, bounds=None) -> GridField:
    c = _case(case)
    x0, x1, y0, y1 = bounds if bounds is not None else c.domain
    x = np.linspace(x0, x1, resolution)
    y = np.linspace(y0, y1, resolution)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return GridField(x, y, reference_solution(c, np.stack([X, Y], axis=-1)), {"case": c.name})


def _facet_arrays(m: NormModel):
    V = np.array([f.v for f in m.facets], dtype=float).reshape(-1, 2)
    W = np.array([f.w for f in m.facets], dtype=float).reshape(-1, 2)
    S = np.array([abs(f.opening) for f in m.facets], dtype=float)
    return V, W, S


@numba.njit(cache=True)
def _ham(p, q, V, W, S):
    out = 0.0
    for k in range(V.shape[0]):
        t = (p * V[k, 0] + q * V[k, 1]) * (p * W[k, 0] + q * W[k, 1]) / S[k]
        if t > out:
            out = t
    return out


@numba.njit(cache=True)
def _lf_sweeps(u, F, hx, hy, floor, V, W, S, tol, maxit):
    nx, ny = u.shape
    delta = 0.0
    for it in range(maxit):
        delta = 0.0
        for d in range(4):
            for a in range(1, nx - 1):
                i = a if d % 2 == 0 else nx - 1 - a
                for b in range(1, ny - 1):
                    j = b if d < 2 else ny - 1 - b
                    p = (u[i + 1, j] - u[i - 1, j]) / (2 * hx)
                    q = (u[i, j + 1] - u[i, j - 1]) / (2 * hy)
                    # viscosity: sup of |dH/dxi_i| over the box of one-sided slopes
                    pl = (u[i, j] - u[i - 1, j]) / hx
                    pr = (u[i + 1, j] - u[i, j]) / hx
                    ql = (u[i, j] - u[i, j - 1]) / hy
                    qr = (u[i, j + 1] - u[i, j]) / hy
                    sx = floor
                    sy = floor
                    for k in range(V.shape[0]):
                        for c in range(4):
                            pp = pl if c < 2 else pr
                            qq = ql if c % 2 == 0 else qr
                            aw = pp * W[k, 0] + qq * W[k, 1]
                            av = pp * V[k, 0] + qq * V[k, 1]
                            gx = abs(V[k, 0] * aw + W[k, 0] * av) / S[k]
                            gy = abs(V[k, 1] * aw + W[k, 1] * av) / S[k]
                            if gx > sx:
                                sx = gx
                            if gy > sy:
                                sy = gy
                    new = (F[i, j] - _ham(p, q, V, W, S)
                           + sx * (u[i + 1, j] + u[i - 1, j]) / (2 * hx)
                           + sy * (u[i, j + 1] + u[i, j - 1]) / (2 * hy)) / (sx / hx + sy / hy)
                    if new < 0.0:
                        new = 0.0
                    dd = abs(new - u[i, j])
                    if dd > delta:
                        delta = dd
                    u[i, j] = new
        if delta < tol:
            return it + 1, delta
    return maxit, delta


def sweep_solver(m: NormModel, d: Rectangle, f=None, resolution: int = 129, *,
                 tol: float = 1e-8, max_sweeps: int = 10_000, sigma_floor: float = 0.05) -> GridField:
    """Lax-Friedrichs fast sweeping for H(Du) = f with u = 0 on the boundary.

    Experimental: the Hamiltonian is neither convex nor coercive.  The
    artificial viscosity at a node is the sup of |dH/dxi_i| over the box
    spanned by the one-sided difference quotients there, floored at
    ``sigma_floor``.  A run that hits ``max_sweeps`` returns the partial
    field with ``info["converged"] = False``.
    """
    if not isinstance(d, Rectangle):
        raise ValueError("sweep_solver needs a rectangle domain")
    f = Constant(1.0) if f is None else f
    x = np.linspace(d.x0, d.x1, resolution)
    y = np.linspace(d.y0, d.y1, resolution)
    X, Y = np.meshgrid(x, y, indexing="ij")
    F = np.asarray(f(np.stack([X, Y], axis=-1)), dtype=float)
    if np.any(F <= 0):
        raise ValueError("f must be positive")
    if m.strictly_convex:
        raise ValueError("no facets: the Hamiltonian vanishes identically")
    V, W, S = _facet_arrays(m)
    u = np.zeros((resolution, resolution))
    sweeps, delta = _lf_sweeps(u, F, x[1] - x[0], y[1] - y[0], sigma_floor, V, W, S, tol, max_sweeps)
    info = {"scheme": "lax-friedrichs", "sweeps": int(sweeps), "last_update": float(delta),
            "converged": bool(delta < tol)}
    return GridField(x, y, u, info)


def kink_mask(g: GridField, threshold: float = 10.0) -> np.ndarray:
    """Nodes where the one-sided slopes jump by more than threshold*h in either direction."""
    u = g.values
    hx, hy = g.h
    kink = np.zeros(u.shape, dtype=bool)
    jump_x = np.abs(u[2:, :] - 2 * u[1:-1, :] + u[:-2, :]) / hx
    jump_y = np.abs(u[:, 2:] - 2 * u[:, 1:-1] + u[:, :-2]) / hy
    kink[1:-1, :] |= jump_x > threshold * hx
    kink[:, 1:-1] |= jump_y > threshold * hy
    return kink


def _dilate(mask: np.ndarray, r: int) -> np.ndarray:
    out = mask.copy()
    for di in range(-r, r + 1):
        for dj in range(-r, r + 1):
            shifted = np.zeros_like(mask)
            src = mask[max(0, -di):mask.shape[0] - max(0, di), max(0, -dj):mask.shape[1] - max(0, dj)]
            shifted[max(0, di):max(0, di) + src.shape[0], max(0, dj):max(0, dj) + src.shape[1]] = src
            out |= shifted
    return out


def residual_check(g: GridField, m: NormModel, f=None, threshold: float = 10.0) -> float:
    """max |H(Dg) - f| over interior nodes at least 2 cells away from detected kinks."""
    nx, ny = g.resolution
    if nx < 17 or ny < 17:
        raise ValueError("residual_check needs at least a 17x17 grid")
    f = Constant(1.0) if f is None else f
    u = g.values
    hx, hy = g.h
    p = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * hx)
    q = (u[1:-1, 2:] - u[1:-1, :-2]) / (2 * hy)
    res = np.abs(hamiltonian(m, np.stack([p, q], axis=-1)) - f(g.nodes()[1:-1, 1:-1]))
    skip = _dilate(kink_mask(g, threshold), 2)[1:-1, 1:-1]
    tested = res[~skip]
    g.info["residual_nodes"] = int(tested.size)
    return float(tested.max()) if tested.size else 0.0


def richardson_ratio(case, x, h: float) -> float:
    """Central-difference gradient error at step h divided by the error at h/2."""
    c = _case(case)
    x = np.asarray(x, dtype=float)
    exact = reference_gradient(c, x)

    def err(step):
        e = []
        for k in range(2):
            d = np.zeros(2)
            d[k] = step
            e.append((reference_solution(c, x + d) - reference_solution(c, x - d)) / (2 * step) - exact[k])
        return float(np.linalg.norm(e))

    return err(h) / err(h / 2)


def band_area(g: GridField, level: float, eps: float) -> float:
    """Area fraction of the eps-band around the level set {g = level}."""
    return float(np.mean(np.abs(g.values - level) < eps))
