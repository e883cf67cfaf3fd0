"""Command line: one subcommand per module plus the full suite.

    quadtoric algebra --n 4
    quadtoric superpotential --n 5 --starts 200
    quadtoric geometry --n 3 --samples 1000 --out runs/geo
    quadtoric flow --n 2 --starts 100 --out runs/flow
    quadtoric model separate --space Qn --n 3
    quadtoric model separate --space dp3 --registry data/D3_registry.json
    quadtoric suite --config run.cfg --out reports

Without ``--out`` the JSON result goes to stdout.  With ``--out DIR`` it is
written to ``DIR/<command>.json`` together with any point clouds (CSV) and
traces (JSONL).  ``--seed`` overrides the config seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config


def _cx(c) -> list[float]:
    return [float(np.real(c)), float(np.imag(c))]


def _emit(args, name: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text + "\n")
        print(f"wrote {out / f'{name}.json'}")
    else:
        print(text)


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


# -- subcommands ---------------------------------------------------------------------

def cmd_algebra(args, cfg) -> int:
    from .algebra import (
        builtin_quadric_table,
        c1_spectrum,
        groups,
        ingest_table,
        is_semisimple,
        primitive_idempotents,
        radical_dimension,
        validate_table,
        write_table,
    )

    t = ingest_table(args.table) if args.table else builtin_quadric_table(args.n)
    rep = validate_table(t)
    payload = {
        "table": t.name,
        "dim": t.dim,
        "valid": rep.ok,
        "failed_invariants": sorted(rep.invariants()),
        "c1_spectrum": [_cx(c) for c in c1_spectrum(t, args.T, check=False)],
    }
    if rep.ok:
        payload["semisimple"] = is_semisimple(t)
        if payload["semisimple"]:
            d = primitive_idempotents(t)
            payload["idempotents"] = [
                {"label": lab, "c1_eigenvalue": _cx(mu), "exponent_denominator": m, "coarse": d.coarse_grouping[lab]}
                for lab, mu, m in zip(d.labels, d.c1_eigenvalues, d.exponent_denominators)
            ]
            payload["coarse_groups"] = groups(d.coarse_grouping)
        else:
            payload["radical_dimension"] = radical_dimension(t)
    if args.write_table:
        write_table(t, args.write_table)
    _emit(args, "algebra", payload)
    return 0 if rep.ok else 1


def cmd_superpotential(args, cfg) -> int:
    from .algebra import builtin_quadric_table
    from .superpotential import SuperpotentialSpec, aks_crosscheck, closed_form_critical_points, match_points, solve

    n = args.n
    starts = args.starts or cfg.newton_starts
    res = solve(n, starts, cfg.seed, deflate=args.deflate)
    dist, _ = match_points(res.points, closed_form_critical_points(n))
    aks = aks_crosscheck(SuperpotentialSpec.quadric(n), builtin_quadric_table(n), res.points, cfg.tol_aks, strict=False)
    payload = {
        "n": n,
        "starts": res.starts,
        "converged": res.converged,
        "dropped": res.dropped,
        "points": [p.as_dict() for p in res.points],
        "closed_form_distance": dist,
        "aks": aks.as_dict(),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = [[i] + sum((_cx(c) for c in p.z), []) + _cx(p.value) + [p.hessian_min_singular] for i, p in enumerate(res.points)]
        header = ["i"] + [f"{part}{k + 1}" for k in range(n) for part in ("re_z", "im_z")] + ["re_W", "im_W", "hess_min_sv"]
        _write_csv(out / "critical_points.csv", header, rows)
    _emit(args, "superpotential", payload)
    return 0 if aks.ok and len(res.points) == n else 1


def cmd_geometry(args, cfg) -> int:
    from .geometry import disjointness_report, fiber_target, gz_batch, sample_sphere, sample_torus
    from .suite import biran_residuals

    n = args.n
    count = args.samples or cfg.geometry_samples
    torus = sample_torus(n, count, cfg.seed + n)
    sphere = sample_sphere(n, count, cfg.seed + n)
    phi_t, phi_s = gz_batch(torus), gz_batch(sphere)
    rep = disjointness_report(n, count, cfg.seed + n)
    payload = {
        "n": n,
        "samples": count,
        "torus_fiber_error": float(np.abs(phi_t - fiber_target(n)).max()),
        "sphere_max_abs": float(np.abs(phi_s).max()),
        "disjointness": rep.as_dict(),
        "biran": biran_residuals(n, count, cfg.seed + n),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        header = [f"lambda{k}" for k in range(2, n + 2)]
        _write_csv(out / "gz_torus.csv", header, phi_t.tolist())
        _write_csv(out / "gz_sphere.csv", header, phi_s.tolist())
    _emit(args, "geometry", payload)
    return 0 if rep.passed else 1


def cmd_flow(args, cfg) -> int:
    from .flow import FlowConfig, flow_report, integrate_batch
    from .geometry import sample_sphere, sample_torus

    n = args.n
    count = args.starts or cfg.flow_starts
    fc = FlowConfig(s_end=args.s_end)
    torus = integrate_batch(sample_torus(n, count, cfg.seed + n), fc, "torus")
    sphere = integrate_batch(sample_sphere(n, count, cfg.seed + n + 1), fc, "sphere")
    rep = flow_report(torus, sphere)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "traces.jsonl").open("w") as fh:
            for tr in torus + sphere:
                for line in tr.jsonl_lines():
                    fh.write(line + "\n")
    _emit(args, "flow", {"n": n, "starts": count, "report": rep.as_dict()})
    return 0 if rep.passed else 1


def cmd_model(args, cfg) -> int:
    from .spectral import del_pezzo_certificate, quadric_certificate

    space = args.space.lower()
    if space == "qn":
        if args.n is None:
            raise SystemExit("--n is required for --space Qn")
        cert = quadric_certificate(args.n, cfg.geometry_samples, cfg.seed + args.n)
    elif space.startswith("dp"):
        if not args.registry:
            raise SystemExit("--registry is required for del Pezzo spaces")
        cert = del_pezzo_certificate(args.registry, args.table)
    else:
        raise SystemExit(f"unknown space {args.space!r} (Qn or dpK)")
    _emit(args, "certificate", cert.as_dict())
    return 0 if cert.verdict else 1


def cmd_suite(args, cfg) -> int:
    from .suite import run_suite, write_report

    if args.out:
        cfg = cfg.replace(out=args.out)
    only = set(args.only.split(",")) if args.only else None

    def progress(rec, dt):
        print(f"{rec.id:>4} {rec.status.upper():4} {rec.name} ({dt:.2f} s)" + (f"  {rec.error}" if rec.error else ""), flush=True)

    rep = run_suite(cfg, only, progress)
    path = Path(cfg.out) / "report.json"
    write_report(rep, path)
    print(f"wrote {path}")
    return 0 if rep.ok else 1


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value run config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory")

    p = argparse.ArgumentParser(prog="quadtoric", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("algebra", parents=[common], help="validate a table, spectrum and idempotents")
    g = a.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int, help="built-in QH(Q^n), 1 <= n <= 6")
    g.add_argument("--table", help="table file to ingest")
    a.add_argument("--T", type=float, default=1.0, help="value of T for the spectrum")
    a.add_argument("--write-table", help="write the table in text form")
    a.set_defaults(func=cmd_algebra)

    s = sub.add_parser("superpotential", parents=[common], help="critical points and AKS match")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--starts", type=int)
    s.add_argument("--deflate", action="store_true")
    s.set_defaults(func=cmd_superpotential)

    ge = sub.add_parser("geometry", parents=[common], help="GZ images, Biran residuals, disjointness")
    ge.add_argument("--n", type=int, required=True)
    ge.add_argument("--samples", type=int)
    ge.set_defaults(func=cmd_geometry)

    f = sub.add_parser("flow", parents=[common], help="gradient-Hamiltonian flow suite")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--starts", type=int)
    f.add_argument("--s-end", type=float, default=0.99)
    f.set_defaults(func=cmd_flow)

    m = sub.add_parser("model", parents=[common], help="spectral model certificates")
    m.add_argument("action", choices=["separate"])
    m.add_argument("--space", required=True, help="Qn or dpK")
    m.add_argument("--n", type=int)
    m.add_argument("--registry")
    m.add_argument("--table")
    m.set_defaults(func=cmd_model)

    su = sub.add_parser("suite", parents=[common], help="run every acceptance check")
    su.add_argument("--only", help="comma list of check ids, e.g. C1,C4")
    su.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return args.func(args, cfg)


if __name__ == "__main__":
    raise SystemExit(main())
