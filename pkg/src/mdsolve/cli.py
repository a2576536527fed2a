"""Command-line entry point.

Subcommands cover each pipeline stage: ``generate`` (grid summaries),
``assemble`` (block statistics), ``export`` / ``import`` (file exchange),
``solve`` (one system), ``sweep`` (parameter grids), and ``amg-stats``
(hierarchy dumps). Flags can be preloaded from a plain-text
config file of ``key = value`` lines, where keys are the long flag names
with dashes or underscores and list-valued flags take comma-separated
values; explicit command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .assembly import PhysicalParams, assemble, monolithic
from .amg import amg_setup
from .bench import GEOMETRIES, SweepResult, SweepSpec, emit_table, run_sweep
from .grids import build_cross_2d, build_random_network_2d, build_regular_network_3d
from .krylov import SolveConfig, gmres
from .precond import approx_schur, build_preconditioner
from .sysio import export_system, import_system

# list-valued flags default to None so "was it given explicitly" is visible;
# scalar flags share these defaults between argparse and the config loader
LIST_KEYS = {"n": int, "kpar": float, "kappa": float, "precond": str}
SCALAR_DEFAULTS = {
    "geometry": ("cross_2d", str),
    "num_fractures": (4, int),
    "num_planes": (3, int),
    "seed": (0, int),
    "import_path": (None, str),
    "matrix_perm": (1.0, float),
    "schur": ("diag", str),
    "inner_omega": ("amg", str),
    "inner_gamma": ("amg", str),
    "tol": (1e-6, float),
    "max_iters": (500, int),
    "restart": (None, int),
    "format": ("aligned-text", str),
    "out": (None, str),
}


def _read_config(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(args, config: dict):
    """Fill config values into flags the user left at their defaults.

    Keys the current subcommand does not use are ignored, so one config file
    can serve several subcommands; keys no subcommand knows are rejected.
    """
    for key, value in config.items():
        if key in LIST_KEYS:
            if not hasattr(args, key):
                continue
            if getattr(args, key) is not None:
                continue  # explicit flag wins
            cast = LIST_KEYS[key]
            setattr(args, key, [cast(p.strip()) for p in value.split(",") if p.strip()])
        elif key in SCALAR_DEFAULTS:
            if not hasattr(args, key):
                continue
            default, cast = SCALAR_DEFAULTS[key]
            if getattr(args, key) != default:
                continue
            setattr(args, key, cast(value))
        else:
            raise ValueError(f"unknown config key {key!r}")
    return args


def _add_geometry_flags(p):
    p.add_argument("--geometry", choices=GEOMETRIES, default="cross_2d")
    p.add_argument("--n", action="append", type=int, default=None,
                   help="cells per direction; repeatable for sweeps")
    p.add_argument("--num-fractures", type=int, default=4, dest="num_fractures")
    p.add_argument("--num-planes", type=int, default=3, dest="num_planes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--import", dest="import_path", default=None,
                   help="directory of an exported system (geometry 'imported')")


def _add_param_flags(p):
    p.add_argument("--kpar", action="append", type=float, default=None,
                   help="tangential fracture permeability; repeatable")
    p.add_argument("--kappa", action="append", type=float, default=None,
                   help="normal fracture transmissivity; repeatable")
    p.add_argument("--matrix-perm", type=float, default=1.0, dest="matrix_perm")


def _add_solver_flags(p):
    p.add_argument("--precond", action="append", default=None,
                   choices=["ml", "bl", "bu", "bd", "none"],
                   help="preconditioner kind; repeatable")
    p.add_argument("--schur", choices=["diag", "exact"], default="diag")
    p.add_argument("--inner-omega", choices=["amg", "direct"], default="amg",
                   dest="inner_omega")
    p.add_argument("--inner-gamma", choices=["amg", "direct"], default="amg",
                   dest="inner_gamma")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=500, dest="max_iters")
    p.add_argument("--restart", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdsolve",
        description="assemble and solve mixed-dimensional flow systems "
                    "with factorization-based block preconditioners",
    )
    parser.add_argument("--config", default=None, help="key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a grid and print its summary")
    _add_geometry_flags(p)
    p.add_argument("--json", action="store_true", help="emit the summary as JSON")

    p = sub.add_parser("assemble", help="assemble a system and print block shapes")
    _add_geometry_flags(p)
    _add_param_flags(p)
    p.add_argument("--out", default=None, help="also export the system to this directory")

    p = sub.add_parser("solve", help="solve one system with GMRES")
    _add_geometry_flags(p)
    _add_param_flags(p)
    _add_solver_flags(p)
    p.add_argument("--history-csv", default=None, dest="history_csv",
                   help="write the residual history to this CSV file")

    p = sub.add_parser("sweep", help="run a parameter sweep and print a table")
    _add_geometry_flags(p)
    _add_param_flags(p)
    _add_solver_flags(p)
    p.add_argument("--format", choices=["csv", "aligned-text", "markdown"],
                   default="aligned-text")
    p.add_argument("--out", default=None, help="write the table to this file")

    p = sub.add_parser("export", help="assemble a system and write it to disk")
    _add_geometry_flags(p)
    _add_param_flags(p)
    p.add_argument("--out", required=True, help="target directory")

    p = sub.add_parser("import", help="read an exported system, validate it and report on it")
    p.add_argument("path", help="directory holding the exported system")

    p = sub.add_parser("amg-stats", help="print the AMG hierarchy for a system's blocks")
    _add_geometry_flags(p)
    _add_param_flags(p)
    return parser


def _single_n(args) -> int:
    ns = args.n or [16]
    if len(ns) != 1:
        raise ValueError("this subcommand takes exactly one --n")
    return ns[0]


def _build_grid(args, n):
    if args.geometry == "cross_2d":
        return build_cross_2d(n)
    if args.geometry == "random_2d":
        return build_random_network_2d(n, args.num_fractures, args.seed)
    if args.geometry == "regular_3d":
        return build_regular_network_3d(n, args.num_planes)
    raise ValueError("geometry 'imported' has no grid; use --import with solve/sweep")


def _build_system(args, n):
    if args.geometry == "imported":
        if not args.import_path:
            raise ValueError("geometry 'imported' needs --import")
        return import_system(args.import_path)
    grid = _build_grid(args, n)
    params = PhysicalParams(
        matrix_permeability=args.matrix_perm,
        k_parallel=(args.kpar or [1.0])[0],
        kappa=(args.kappa or [1.0])[0],
    )
    return assemble(grid, params)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config(args, _read_config(args.config))
        return _dispatch(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    cmd = args.command

    if cmd == "generate":
        grid = _build_grid(args, _single_n(args))
        print(json.dumps(grid.summary(), indent=2) if args.json else grid.describe())
        return 0

    if cmd == "assemble":
        system = _build_system(args, _single_n(args))
        print(f"n_omega = {system.n_omega}, n_gamma = {system.n_gamma}")
        for name in ("a_omega_omega", "a_omega_gamma", "a_gamma_omega", "a_gamma_gamma"):
            block = getattr(system, name)
            print(f"  {name}: shape {block.shape}, nnz {block.nnz}")
        if args.out:
            export_system(system, args.out)
            print(f"exported to {args.out}")
        return 0

    if cmd == "solve":
        system = _build_system(args, _single_n(args))
        operator = monolithic(system)
        kind = (args.precond or ["ml"])[0]
        cfg = SolveConfig(rel_tol=args.tol, max_iters=args.max_iters, restart=args.restart)
        prec = None
        if kind != "none":
            prec = build_preconditioner(
                system, kind=kind, schur_mode=args.schur,
                inner_omega=args.inner_omega, inner_gamma=args.inner_gamma,
            )
        report = gmres(operator, system.rhs, prec, cfg)
        status = "converged" if report.converged else "did NOT converge"
        print(f"{status} in {report.iterations} iterations "
              f"(true relative residual {report.true_residual:.3e}, "
              f"solve {report.solve_seconds:.3f}s)")
        if args.history_csv:
            lines = ["iteration,relative_residual"]
            lines += [f"{i},{r!r}" for i, r in enumerate(report.residual_history)]
            Path(args.history_csv).write_text("\n".join(lines) + "\n")
            print(f"history written to {args.history_csv}")
        return 0 if report.converged else 1

    if cmd == "sweep":
        spec = SweepSpec(
            geometry=args.geometry,
            mesh_sizes=tuple(args.n or [16]),
            k_parallel_values=tuple(args.kpar or [1.0]),
            kappa_values=tuple(args.kappa or [1.0]),
            precond_kinds=tuple(args.precond or ["ml"]),
            schur_mode=args.schur,
            inner_omega=args.inner_omega,
            inner_gamma=args.inner_gamma,
            matrix_permeability=args.matrix_perm,
            num_fractures=args.num_fractures,
            num_planes=args.num_planes,
            seed=args.seed,
            import_path=args.import_path,
            solver=SolveConfig(rel_tol=args.tol, max_iters=args.max_iters,
                               restart=args.restart),
        )
        result = run_sweep(spec)
        table = emit_table(result, args.format)
        if args.out:
            Path(args.out).write_text(table)
            print(f"table written to {args.out}")
        else:
            print(table, end="")
        failures = [r for r in result.rows if not r.converged]
        return 1 if failures else 0

    if cmd == "export":
        system = _build_system(args, _single_n(args))
        export_system(system, args.out)
        print(f"exported to {args.out}")
        return 0

    if cmd == "import":
        system = import_system(args.path)
        print(f"valid block system: n_omega = {system.n_omega}, n_gamma = {system.n_gamma}")
        return 0

    if cmd == "amg-stats":
        system = _build_system(args, _single_n(args))
        schur = approx_schur(system)
        print("hierarchy for the approximate Schur complement:")
        print(amg_setup(schur).describe())
        print("hierarchy for the interface block:")
        print(amg_setup(system.a_gamma_gamma).describe())
        return 0

    raise ValueError(f"unhandled command {cmd!r}")


if __name__ == "__main__":
    raise SystemExit(main())
