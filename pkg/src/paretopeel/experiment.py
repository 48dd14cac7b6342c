"""Experiment configs and the convergence runner behind ``paretopeel converge``."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .norm import NormModel, norm_from_spec, preset
from .peel import convex_peel, height_field, peel, weak_l1_peel
from .reference import CASES, reference_solution
from .sampling import Constant, Rectangle, domain_from_spec, intensity_from_spec, sample_poisson
from .sorting import depth_at, longest_chain, nds_depth

SCHEMA = "paretopeel.experiment/1"
METHODS = ("pareto", "convex", "weak-l1", "nds")
OBSERVABLES = ("center-height", "sup-error-vs-reference", "layer-count", "chain-length", "anisotropy")
LATTICE = 33


class ConfigError(ValueError):
    pass


class RunFailure(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    method: str
    domain: object
    intensity: object
    n: list
    seeds_per_n: int
    observables: list
    norm: NormModel | None = None
    reference: str | None = None
    base_seed: int = 0
    center: tuple | None = None
    name: str = "experiment"
    outputs: dict = field(default_factory=lambda: {"runs": "runs.csv"})

    @property
    def exponent(self) -> float:
        return 1.0 if self.method == "weak-l1" else 0.5

    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.seeds_per_n)]

    def center_point(self) -> np.ndarray:
        if self.center is not None:
            return np.asarray(self.center, dtype=float)
        x0, x1, y0, y1 = self.domain.bbox
        return np.array([(x0 + x1) / 2, (y0 + y1) / 2])


_KEYS = {"schema", "name", "method", "norm", "domain", "intensity", "n", "seeds_per_n",
         "base_seed", "observables", "reference", "center", "outputs"}


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if raw.get("schema") != SCHEMA:
        raise ConfigError(f"schema must be {SCHEMA!r}")
    method = raw.get("method", "pareto")
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}")
    try:
        norm = norm_from_spec(raw["norm"]) if "norm" in raw else None
        domain = domain_from_spec(raw.get("domain", "square"))
        intensity = intensity_from_spec(raw.get("intensity", {"type": "constant", "value": 1.0}))
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    if method == "pareto" and norm is None:
        raise ConfigError("pareto peeling needs a norm")
    ns = raw.get("n")
    if not isinstance(ns, list) or not ns or not all(isinstance(v, (int, float)) and v > 0 for v in ns):
        raise ConfigError("n must be a non-empty list of positive numbers")
    spn = raw.get("seeds_per_n", 1)
    if not isinstance(spn, int) or spn < 1:
        raise ConfigError("seeds_per_n must be a positive integer")
    obs = raw.get("observables", ["center-height"])
    bad = [o for o in obs if o not in OBSERVABLES]
    if bad or not obs:
        raise ConfigError(f"unknown observables: {bad}")
    ref = raw.get("reference")
    if "sup-error-vs-reference" in obs and ref is None:
        raise ConfigError("sup-error-vs-reference needs a reference case")
    outputs = raw.get("outputs", {"runs": "runs.csv"})
    if not isinstance(outputs, dict) or set(outputs) - {"runs"}:
        raise ConfigError("outputs may only name 'runs'")
    center = raw.get("center")
    cfg = ExperimentConfig(method=method, domain=domain, intensity=intensity, n=list(ns),
                           seeds_per_n=spn, observables=list(obs), norm=norm, reference=ref,
                           base_seed=int(raw.get("base_seed", 0)),
                           center=tuple(center) if center is not None else None,
                           name=str(raw.get("name", "experiment")), outputs=outputs)
    if ref is not None:
        _check_reference(cfg)
    return cfg


def _same_norm(a: NormModel | None, b: NormModel) -> bool:
    if a is None:
        return False
    return (a.euclidean_weight == b.euclidean_weight and a.functionals.shape == b.functionals.shape
            and np.allclose(a.functionals, b.functionals, atol=1e-12))


def _check_reference(cfg: ExperimentConfig) -> None:
    case = CASES.get(cfg.reference)
    if case is None:
        raise ConfigError(f"unknown reference case {cfg.reference!r}")
    f = cfg.intensity
    if not (isinstance(f, Constant) and f.value == 1.0):
        raise ConfigError("reference cases assume f = 1")
    d = cfg.domain
    if case.name == "l1-quadrant":
        ok = cfg.method == "nds" and isinstance(d, Rectangle) and d.x0 == 0 and d.y0 == 0
    else:
        want = {"weak-l1-square": "weak-l1"}.get(case.name, "pareto")
        ok = (cfg.method == want and isinstance(d, Rectangle) and d.bbox == case.domain
              and (want == "weak-l1" or _same_norm(cfg.norm, preset(case.norm))))
    if not ok:
        raise ConfigError(f"reference {case.name!r} does not match the configured norm, domain and intensity")


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(raw)


def interior_lattice(d, size: int = LATTICE) -> np.ndarray:
    x0, x1, y0, y1 = d.bbox
    gx = x0 + (np.arange(size) + 1) * (x1 - x0) / (size + 1)
    gy = y0 + (np.arange(size) + 1) * (y1 - y0) / (size + 1)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts[d.contains(pts)]


class Replica:
    """One sampled cloud and its peeling, with lazily evaluated heights."""

    def __init__(self, cfg: ExperimentConfig, n: float, seed: int):
        self.cfg, self.n, self.seed = cfg, n, seed
        self.A = sample_poisson(cfg.domain, cfg.intensity, n, seed)
        self.result = None
        self.depth = None
        if cfg.method == "pareto":
            self.result = peel(self.A, cfg.norm)
        elif cfg.method == "convex":
            self.result = convex_peel(self.A)
        elif cfg.method == "weak-l1":
            self.result = weak_l1_peel(self.A)
        else:
            self.depth = nds_depth(self.A)

    def heights(self, xs) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if self.depth is not None:
            return depth_at(self.A, xs, self.depth)
        return height_field(self.result, self.A, self.cfg.norm, xs)

    def scaled(self, xs) -> np.ndarray:
        return self.heights(xs) / self.n ** self.cfg.exponent

    def observable(self, name: str) -> float:
        cfg = self.cfg
        c = cfg.center_point()
        if name == "center-height":
            return float(self.scaled(c)[0])
        if name == "sup-error-vs-reference":
            pts = interior_lattice(cfg.domain)
            return float(np.max(np.abs(self.scaled(pts) - reference_solution(cfg.reference, pts))))
        if name == "layer-count":
            count = self.depth.max_depth if self.depth is not None else self.result.layers
            return count / self.n ** cfg.exponent
        if name == "chain-length":
            return longest_chain(self.A) / math.sqrt(self.n)
        # anisotropy: axis versus diagonal height at half the inradius
        x0, x1, y0, y1 = cfg.domain.bbox
        r = 0.25 * min(x1 - x0, y1 - y0)
        h = self.scaled(np.array([c + [r, 0.0], c + [r / math.sqrt(2), r / math.sqrt(2)]]))
        return float(h[0] / h[1]) if h[1] > 0 else math.nan


def run_replica(cfg: ExperimentConfig, n: float, seed: int) -> list[tuple]:
    t0 = time.perf_counter()
    rep = Replica(cfg, n, seed)
    values = [(o, rep.observable(o)) for o in cfg.observables]
    ms = (time.perf_counter() - t0) * 1000.0
    return [(n, seed, o, v, ms) for o, v in values]


def _fmt_n(n) -> str:
    return str(int(n)) if float(n).is_integer() else repr(float(n))


def run_convergence(cfg: ExperimentConfig, out_dir, threads: int = 1) -> Path:
    """Run every (n, seed) replica and write runs.csv in config order.

    Replicas run on a thread pool; the single writer below consumes
    futures in submission order, so the file does not depend on the
    thread count except for the wall_time_ms column. A failed replica
    leaves ``error:<type>`` rows and RunFailure is raised once all
    replicas are done.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / cfg.outputs.get("runs", "runs.csv")
    jobs = [(n, s) for n in cfg.n for s in cfg.seeds()]
    failures = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool, open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "seed", "observable", "value", "wall_time_ms"])
        futures = [pool.submit(run_replica, cfg, n, s) for n, s in jobs]
        for (n, s), fut in zip(jobs, futures):
            try:
                rows = fut.result()
            except Exception as exc:  # recorded as error rows; the run carries on
                failures.append(f"n={n} seed={s}: {exc!r}")
                for obs in cfg.observables:
                    out.writerow([_fmt_n(n), s, obs, f"error:{type(exc).__name__}", ""])
                continue
            for n_, seed, obs, val, ms in rows:
                out.writerow([_fmt_n(n_), seed, obs, repr(float(val)), f"{ms:.1f}"])
    if failures:
        raise RunFailure("; ".join(failures))
    return path


def read_runs(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
