"""Command line entry point.

Exit codes: 0 success, 2 bad configuration or arguments, 3 a run failed.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from .experiment import ConfigError, RunFailure, load_config, run_convergence
from .norm import hamiltonian, norm_from_spec
from .peel import HULL, PeelResult, peel, read_points_csv, weak_l1_peel, write_peel_csv
from .reference import CASES, reference_grid
from .render import render_field_svg, render_svg
from .sampling import SamplingError, domain_from_spec, intensity_from_spec, sample_poisson
from .sorting import nds_depth

EXIT_OK, EXIT_CONFIG, EXIT_RUN = 0, 2, 3


def _cloud(args):
    """Points from --input, else sampled from --config or the --domain/--n flags."""
    if args.input:
        return read_points_csv(args.input)
    if args.config:
        cfg = load_config(args.config)
        return sample_poisson(cfg.domain, cfg.intensity, cfg.n[0],
                              args.seed if args.seed is not None else cfg.base_seed)
    try:
        d = domain_from_spec(args.domain)
        f = intensity_from_spec(args.intensity)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return sample_poisson(d, f, args.n, args.seed or 0)


def _norm(args):
    if args.norm is None and args.config:
        cfg = load_config(args.config)
        if cfg.norm is not None:
            return cfg.norm
    try:
        return norm_from_spec(args.norm or "linf")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_peel(args) -> int:
    m = _norm(args)
    A = _cloud(args)
    pr = peel(A, m)
    write_peel_csv(args.out_dir / "points.csv", A, pr)
    print(f"{len(A)} points, {pr.layers} layers -> {args.out_dir / 'points.csv'}")
    return EXIT_OK


def cmd_weakpeel(args) -> int:
    A = _cloud(args)
    pr = weak_l1_peel(A)
    write_peel_csv(args.out_dir / "points.csv", A, pr)
    print(f"{len(A)} points, {pr.layers} layers -> {args.out_dir / 'points.csv'}")
    return EXIT_OK


def cmd_sort(args) -> int:
    A = _cloud(args)
    d = nds_depth(A).depth
    path = args.out_dir / "depth.csv"
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x1", "x2", "depth"])
        for (x1, x2), k in zip(A, d):
            out.writerow([repr(float(x1)), repr(float(x2)), int(k)])
    print(f"{len(A)} points, max depth {int(d.max()) if len(d) else 0} -> {path}")
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    m = _norm(args)
    th = 2 * math.pi * np.arange(args.samples) / args.samples
    xi = np.column_stack([np.cos(th), np.sin(th)])
    H = hamiltonian(m, xi)
    path = args.out_dir / "hamiltonian.csv"
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["theta", "xi1", "xi2", "value"])
        for t, (a, b), h in zip(th, xi, H):
            out.writerow([repr(float(t)), repr(float(a)), repr(float(b)), repr(float(h))])
    print(f"{len(m.facets)} facets, max H on the unit circle {H.max():.6g} -> {path}")
    return EXIT_OK


def cmd_converge(args) -> int:
    if not args.config:
        raise ConfigError("converge needs --config")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.base_seed = args.seed
    path = run_convergence(cfg, args.out_dir, threads=args.threads)
    print(f"wrote {path}")
    return EXIT_OK


def _read_peel_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x1", "x2", "layer", "reason"} <= set(rows[0]):
        raise ConfigError(f"{path} is not a points.csv file")
    A = np.array([[float(r["x1"]), float(r["x2"])] for r in rows]).reshape(-1, 2)
    layer = np.array([int(r["layer"]) for r in rows])
    reason = np.array([HULL if r["reason"] == "convex-hull" else 0 for r in rows])
    return A, PeelResult(layer, reason, int(layer.max()) + 1 if len(layer) else 0)


def cmd_render(args) -> int:
    if args.reference:
        if args.reference not in CASES:
            raise ConfigError(f"unknown reference case {args.reference!r}")
        case = CASES[args.reference]
        bounds = case.domain if math.isfinite(case.domain[1]) else (0.0, 1.0, 0.0, 1.0)
        g = reference_grid(case, args.resolution, bounds)
        path = args.out_dir / f"{case.name}.svg"
        path.write_text(render_field_svg(g))
        g.to_csv(args.out_dir / f"{case.name}.csv")
    else:
        if not args.input:
            raise ConfigError("render needs --input points.csv or --reference CASE")
        A, pr = _read_peel_csv(args.input)
        path = args.out_dir / "peel.svg"
        path.write_text(render_svg(pr, A, every=args.every))
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path)
    common.add_argument("--seed", type=int)
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--threads", type=int, default=1)

    cloud = argparse.ArgumentParser(add_help=False)
    cloud.add_argument("--input", type=Path, help="CSV with x1,x2 columns")
    cloud.add_argument("--domain", default="square")
    cloud.add_argument("--intensity", type=float, default=1.0)
    cloud.add_argument("--n", type=float, default=1000.0)

    p = argparse.ArgumentParser(prog="paretopeel", description="Pareto hull peeling experiments")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("peel", parents=[common, cloud])
    s.add_argument("--norm")
    s.set_defaults(func=cmd_peel)
    s = sub.add_parser("sort", parents=[common, cloud])
    s.set_defaults(func=cmd_sort)
    s = sub.add_parser("weakpeel", parents=[common, cloud])
    s.set_defaults(func=cmd_weakpeel)
    s = sub.add_parser("hamiltonian", parents=[common])
    s.add_argument("--norm")
    s.add_argument("--samples", type=int, default=360)
    s.set_defaults(func=cmd_hamiltonian)
    s = sub.add_parser("converge", parents=[common])
    s.set_defaults(func=cmd_converge)
    s = sub.add_parser("render", parents=[common])
    s.add_argument("--input", type=Path)
    s.add_argument("--every", type=int, default=1)
    s.add_argument("--reference")
    s.add_argument("--resolution", type=int, default=129)
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        args.out_dir.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RunFailure, SamplingError, OSError, ValueError, RuntimeError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN


if __name__ == "__main__":
    sys.exit(main())
