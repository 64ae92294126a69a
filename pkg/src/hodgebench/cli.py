"""Command-line surface: spectra, identity ledgers and bound reports.

Geometry specs are ``name:param,param`` strings::

    icosphere:SUBDIV[,RADIUS]      closed sphere mesh
    ellipsoid:A,B,C[,SUBDIV]       scaled icosphere
    ball:SUBDIV                    solid unit-ball tet mesh
    torus:NU,NV[,R,r]              genus-1 surface
    sphere:N[,RADIUS]              analytic round sphere (bounds only)

Exit codes: 0 ok; 2 mesh validation failure; 3 eigensolver failure;
4 residual fails to decrease across refinement levels; 5 an applicable
bound verdict is violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    GeometryCase,
    equality_case_diagnostics,
    main_lower_bound,
    special_killing_relation,
    upper_bound_degree_one,
    upper_bound_degree_p,
    verdict_table,
    verdicts_to_json,
    xia_bound,
)
from .fields import (
    FORM_FIELD_NAMES,
    SCALAR_FIELD_NAMES,
    named_form_field,
    named_scalar_field,
)
from .meshes import (
    MeshComplex,
    MeshError,
    generate_ball,
    generate_ellipsoid,
    generate_icosphere,
    generate_torus,
    load_mesh,
)
from .reilly import evaluate_classical_reilly, evaluate_reilly
from .spectrum import (
    SolverError,
    spectrum_functions,
    spectrum_one_forms,
    spectrum_two_forms,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_NO_CONVERGENCE = 4
EXIT_VIOLATION = 5

RESIDUAL_FLOOR = 1e-10  # relative residuals below this count as converged


@dataclass
class RunConfig:
    command: str
    geometry: str | None = None
    mesh: str | None = None
    p: int | None = None
    k: int = 10
    levels: str = "3"
    field: str = "linear-x1"
    order: int = 2
    tol: float | None = None
    out: str = "."
    seed: int = 0
    suite: str | None = None
    theorem: str = "all"
    strict_dec: bool = False
    cluster_tol: float = 1e-3

    def to_dict(self):
        return asdict(self)


def parse_geometry(spec: str):
    """Resolve a geometry spec string to a mesh or analytic case."""
    name, _, rest = spec.partition(":")
    params = [float(tok) for tok in rest.split(",") if tok] if rest else []
    if name == "icosphere":
        sub = int(params[0]) if params else 3
        radius = params[1] if len(params) > 1 else 1.0
        return generate_icosphere(sub, radius)
    if name == "ellipsoid":
        if len(params) < 3:
            raise ValueError("ellipsoid needs a,b,c[,subdivisions]")
        sub = int(params[3]) if len(params) > 3 else 3
        return generate_ellipsoid(params[0], params[1], params[2], sub)
    if name == "ball":
        sub = int(params[0]) if params else 3
        return generate_ball(sub)
    if name == "torus":
        nu = int(params[0]) if params else 24
        nv = int(params[1]) if len(params) > 1 else 12
        big = params[2] if len(params) > 2 else 2.0
        small = params[3] if len(params) > 3 else 0.7
        return generate_torus(nu, nv, big, small)
    if name == "sphere":
        n = int(params[0]) if params else 2
        radius = params[1] if len(params) > 1 else 1.0
        return GeometryCase.sphere(n, radius)
    raise ValueError(f"unknown geometry {name!r}")


def _resolve_mesh(cfg: RunConfig):
    if cfg.mesh:
        return load_mesh(cfg.mesh)
    if cfg.geometry:
        geo = parse_geometry(cfg.geometry)
        if not isinstance(geo, MeshComplex):
            raise ValueError("this command needs a mesh geometry")
        return geo
    raise ValueError("provide --geometry or --mesh")


def _out_path(cfg: RunConfig, filename: str) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / filename


def _stamp(cfg: RunConfig) -> dict:
    return {"version": __version__, "config": cfg.to_dict()}


def _write_csv(path, header, rows, cfg):
    with open(path, "w", newline="") as fh:
        fh.write(f"# version={__version__} config={json.dumps(cfg.to_dict())}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(cfg: RunConfig) -> int:
    mesh = _resolve_mesh(cfg)
    degree = cfg.p if cfg.p is not None else 0
    solver = {0: spectrum_functions, 1: spectrum_one_forms, 2: spectrum_two_forms}
    if degree not in solver:
        raise ValueError("spectrum degree must be 0, 1 or 2")
    report = solver[degree](
        mesh, cfg.k, cluster_tol=cfg.cluster_tol, strict=cfg.strict_dec
    )
    report.to_json(_out_path(cfg, "spectrum.json"), extra=_stamp(cfg))
    report.to_csv(_out_path(cfg, "spectrum.csv"))
    first = report.clusters[0] if report.clusters else (float("nan"), 0)
    print(
        f"degree-{degree} spectrum of {mesh.metadata.get('generator', 'mesh')}: "
        f"{len(report.eigenvalues)} eigenvalues, "
        f"harmonic x{report.count('harmonic')}, first cluster {first[0]:.6g} (x{first[1]})"
    )
    return EXIT_OK


def cmd_reilly(cfg: RunConfig) -> int:
    if cfg.mesh:
        levels = [0]  # a file mesh is evaluated once; levels refine generated balls
    elif ".." in cfg.levels:
        lo, hi = cfg.levels.split("..")
        levels = list(range(int(lo), int(hi) + 1))
    else:
        levels = [int(tok) for tok in cfg.levels.split(",")]
    scalar = cfg.field in SCALAR_FIELD_NAMES
    if not scalar and cfg.field not in FORM_FIELD_NAMES:
        raise ValueError(
            f"unknown field {cfg.field!r}; scalars: {SCALAR_FIELD_NAMES}, forms: {FORM_FIELD_NAMES}"
        )
    rows = []
    ledgers = []
    for level in levels:
        if cfg.mesh:
            mesh = load_mesh(cfg.mesh)
        else:
            mesh = generate_ball(level)
        if scalar:
            ledger = evaluate_classical_reilly(mesh, named_scalar_field(cfg.field), order=cfg.order)
        else:
            ledger = evaluate_reilly(mesh, named_form_field(cfg.field), order=cfg.order)
        ledger.meta["level"] = level
        ledgers.append(ledger)
        rows.append(
            [level, mesh.n_vertices, f"{ledger.residual:.16g}", f"{ledger.relative_residual:.16g}"]
        )
        print(
            f"level {level}: residual {ledger.residual:+.6e} "
            f"(relative {ledger.relative_residual:.3e})"
        )
    ledgers[-1].to_json(_out_path(cfg, "reilly.json"), extra=_stamp(cfg))
    _write_csv(
        _out_path(cfg, "reilly_convergence.csv"),
        ["level", "n_vertices", "residual", "relative_residual"],
        rows,
        cfg,
    )
    rel = [l.relative_residual for l in ledgers]
    for prev, cur in zip(rel, rel[1:]):
        if cur > max(prev, RESIDUAL_FLOOR):
            print(
                f"relative residual increased across levels: {prev:.3e} -> {cur:.3e}",
                file=sys.stderr,
            )
            return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _sphere_suite(tol):
    verdicts = []
    for n in (1, 2, 3, 4, 5):
        for radius in (1.0, 2.0):
            case = GeometryCase.sphere(n, radius)
            for p in range(1, (n + 1) // 2 + 1):
                verdicts.append(main_lower_bound(case, p, tol))
            verdicts.append(xia_bound(case, tol))
            verdicts.append(upper_bound_degree_one(case, tol))
            for p in range(2, n):
                verdicts.append(upper_bound_degree_p(case, p, tol))
        for p in range(0, n):
            _, verdict = special_killing_relation(1.0, p, n)
            verdicts.append(verdict)
    return verdicts


def _ellipsoid_suite(tol, p=1):
    axes = [
        (1.0, 1.0, 1.1),
        (1.0, 1.1, 1.2),
        (0.9, 1.0, 1.1),
        (1.0, 1.0, 1.3),
        (1.0, 1.2, 1.3),
    ]
    verdicts = []
    for abc in axes:
        case = GeometryCase.ellipsoid(*abc)
        verdicts.append(main_lower_bound(case, p, tol))
        verdicts.append(xia_bound(case, tol))
        verdicts.append(upper_bound_degree_one(case, tol))
    return verdicts


def cmd_bounds(cfg: RunConfig) -> int:
    verdicts = []
    reports = []
    if cfg.suite == "spheres":
        verdicts = _sphere_suite(cfg.tol)
    elif cfg.suite == "ellipsoids":
        verdicts = _ellipsoid_suite(cfg.tol, cfg.p or 1)
    elif cfg.suite == "balls":
        reports.append(equality_case_diagnostics(3, p=cfg.p or 1, radius=1.0))
        reports.append(equality_case_diagnostics(generate_ball(3), p=cfg.p or 1))
    elif cfg.geometry:
        geo = parse_geometry(cfg.geometry)
        case = (
            geo
            if isinstance(geo, GeometryCase)
            else GeometryCase.from_surface_mesh(geo)
        )
        p = cfg.p or 1
        verdicts.append(main_lower_bound(case, p, cfg.tol))
        verdicts.append(xia_bound(case, cfg.tol))
        verdicts.append(upper_bound_degree_one(case, cfg.tol))
    else:
        raise ValueError("provide --suite or --geometry")

    if cfg.theorem != "all":
        keep = {
            "lower-p": "p_form_lower_bound",
            "xia": "xia_bound",
            "upper-1": "parallel_upper_bound_degree_one",
            "upper-p": "parallel_upper_bound_degree_p",
            "killing": "special_killing_eigenvalue",
        }.get(cfg.theorem)
        if keep is None:
            raise ValueError(f"unknown theorem id {cfg.theorem!r}")
        verdicts = [v for v in verdicts if v.name == keep]

    extra = _stamp(cfg)
    if reports:
        extra["equality_diagnostics"] = [r.to_dict() for r in reports]
    verdicts_to_json(verdicts, _out_path(cfg, "bounds.json"), extra=extra)
    if verdicts:
        print(verdict_table(verdicts))
    for rep in reports:
        status = "ok" if rep.satisfied else "FAILED"
        print(f"equality diagnostics {rep.geometry['label']}: {status}")
        for name, got, want, ok in rep.checks:
            print(f"  {name}: {got:.6g} vs {want:.6g} ({'ok' if ok else 'FAIL'})")
    violated = [v for v in verdicts if v.applicable and not v.satisfied]
    if violated or any(not r.satisfied for r in reports):
        for v in violated:
            print(f"VIOLATED: {v.name} on {v.geometry.get('label')}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgebench",
        description="spectral-geometry workbench: spectra, identity ledgers, bound reports",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--geometry", help="geometry spec, e.g. icosphere:4 or ball:3")
        sp.add_argument("--mesh", help="path to an OFF/OBJ/tet mesh file")
        sp.add_argument("--out", default=os.environ.get("HODGEBENCH_OUT", "."))
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("spectrum", help="Hodge-Laplacian eigenvalues of a surface mesh")
    common(sp)
    sp.add_argument("--p", type=int, default=0, choices=(0, 1, 2), help="form degree")
    sp.add_argument("--k", type=int, default=10, help="number of eigenvalues")
    sp.add_argument("--cluster-tol", type=float, default=1e-3, dest="cluster_tol")
    sp.add_argument("--strict-dec", action="store_true", dest="strict_dec",
                    help="error out on nonpositive Hodge weights instead of clamping")

    sp = sub.add_parser("reilly", help="energy-identity ledgers over refinement levels")
    common(sp)
    sp.add_argument("--field", default="linear-x1",
                    help=f"scalars: {', '.join(SCALAR_FIELD_NAMES)}; forms: {', '.join(FORM_FIELD_NAMES)}")
    sp.add_argument("--levels", default="1..3", help="e.g. 1..3 or 2,3")
    sp.add_argument("--order", type=int, default=2, choices=(1, 2), help="quadrature order")

    sp = sub.add_parser("bounds", help="eigenvalue bound verdicts on geometry suites")
    common(sp)
    sp.add_argument("--suite", choices=("spheres", "ellipsoids", "balls"))
    sp.add_argument("--theorem", default="all",
                    choices=("all", "lower-p", "xia", "upper-1", "upper-p", "killing"))
    sp.add_argument("--p", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        # config supplies defaults; flags given explicitly on the line win
        with open(args.config) as fh:
            defaults = json.load(fh)
        for key, value in defaults.items():
            dest = key.replace("-", "_")
            flag = "--" + key.replace("_", "-")
            if flag not in argv and hasattr(args, dest):
                setattr(args, dest, value)
    cfg = RunConfig(
        command=args.command,
        geometry=getattr(args, "geometry", None),
        mesh=getattr(args, "mesh", None),
        p=getattr(args, "p", None),
        k=getattr(args, "k", 10),
        levels=getattr(args, "levels", "3"),
        field=getattr(args, "field", "linear-x1"),
        order=getattr(args, "order", 2),
        tol=getattr(args, "tol", None),
        out=getattr(args, "out", "."),
        seed=getattr(args, "seed", 0),
        suite=getattr(args, "suite", None),
        theorem=getattr(args, "theorem", "all"),
        strict_dec=getattr(args, "strict_dec", False),
        cluster_tol=getattr(args, "cluster_tol", 1e-3),
    )
    np.random.seed(cfg.seed)
    try:
        if cfg.command == "spectrum":
            return cmd_spectrum(cfg)
        if cfg.command == "reilly":
            return cmd_reilly(cfg)
        if cfg.command == "bounds":
            return cmd_bounds(cfg)
        parser.error(f"unknown command {cfg.command}")
    except MeshError as exc:
        print(f"mesh error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
