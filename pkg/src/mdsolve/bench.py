"""Parameter sweep harness.

Runs the geometry / mesh-size / permeability / preconditioner grid the way
the robustness studies in the literature tabulate GMRES iteration counts:
one row per parameter tuple, grids cached per mesh size, every solve with a
zero initial guess and a relative residual stopping criterion. Individual
tuple failures are recorded in their row and do not abort the sweep.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import PhysicalParams, assemble, monolithic
from .amg import AmgParams
from .grids import build_cross_2d, build_random_network_2d, build_regular_network_3d
from .krylov import SolveConfig, gmres
from .precond import build_preconditioner
from .sysio import import_system

__all__ = ["GEOMETRIES", "SweepSpec", "SweepRow", "SweepResult", "run_sweep", "emit_table"]

GEOMETRIES = ("cross_2d", "random_2d", "regular_3d", "imported")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: the cartesian product of mesh sizes, tangential and normal
    fracture permeabilities, and preconditioner kinds.

    ``mesh_sizes`` is the mesh refinement knob (cells per direction); on the
    matching grids this package builds it refines fractures and matrix
    together, so it doubles as the fracture-refinement parameter. For
    ``geometry="imported"`` set ``import_path`` and a single placeholder
    mesh size.
    """

    geometry: str = "cross_2d"
    mesh_sizes: tuple = (16,)
    k_parallel_values: tuple = (1.0,)
    kappa_values: tuple = (1.0,)
    precond_kinds: tuple = ("ml",)
    schur_mode: str = "diag"
    inner_omega: str = "amg"
    inner_gamma: str = "amg"
    matrix_permeability: float = 1.0
    num_fractures: int = 4
    num_planes: int = 3
    seed: int = 0
    import_path: str | None = None
    solver: SolveConfig = field(default_factory=SolveConfig)
    amg_params: AmgParams = field(default_factory=AmgParams)

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}, expected one of {GEOMETRIES}")
        for name in ("mesh_sizes", "k_parallel_values", "kappa_values", "precond_kinds"):
            if not len(getattr(self, name)):
                raise ValueError(f"{name} must be nonempty")
        if any(n < 2 for n in self.mesh_sizes) and self.geometry != "imported":
            raise ValueError("mesh sizes must be at least 2")
        if any(v <= 0 for v in self.k_parallel_values + self.kappa_values):
            raise ValueError("permeability values must be positive")
        if self.geometry == "imported" and not self.import_path:
            raise ValueError("geometry 'imported' needs import_path")


@dataclass
class SweepRow:
    geometry: str
    n: int
    k_parallel: float
    kappa: float
    kind: str
    iterations: int
    converged: bool
    residual: float
    setup_seconds: float
    solve_seconds: float
    n_omega: int
    n_gamma: int
    error: str = ""

    FIELDS = (
        "geometry", "n", "k_parallel", "kappa", "kind", "iterations",
        "converged", "residual", "setup_seconds", "solve_seconds",
        "n_omega", "n_gamma", "error",
    )

    def as_tuple(self):
        return tuple(getattr(self, f) for f in self.FIELDS)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list


def _build_grid(spec: SweepSpec, n: int):
    if spec.geometry == "cross_2d":
        return build_cross_2d(n)
    if spec.geometry == "random_2d":
        return build_random_network_2d(n, spec.num_fractures, spec.seed)
    if spec.geometry == "regular_3d":
        return build_regular_network_3d(n, spec.num_planes)
    raise ValueError(f"geometry {spec.geometry!r} is not grid-backed")


def run_sweep(spec: SweepSpec, progress=None) -> SweepResult:
    """Execute the sweep; deterministic for identical specs and seeds.

    ``progress`` may be a callable taking the finished :class:`SweepRow`.
    """
    rows = []
    grids = {}
    for n in spec.mesh_sizes:
        if spec.geometry != "imported" and n not in grids:
            grids[n] = _build_grid(spec, n)
        for k_par in spec.k_parallel_values:
            for kappa in spec.kappa_values:
                if spec.geometry == "imported":
                    system = import_system(spec.import_path)
                else:
                    params = PhysicalParams(
                        matrix_permeability=spec.matrix_permeability,
                        k_parallel=k_par,
                        kappa=kappa,
                    )
                    system = assemble(grids[n], params)
                operator = monolithic(system)
                for kind in spec.precond_kinds:
                    row = SweepRow(
                        geometry=spec.geometry, n=n, k_parallel=k_par, kappa=kappa,
                        kind=kind, iterations=0, converged=False, residual=np.nan,
                        setup_seconds=0.0, solve_seconds=0.0,
                        n_omega=system.n_omega, n_gamma=system.n_gamma,
                    )
                    try:
                        t0 = time.perf_counter()
                        if kind == "none":
                            prec = None
                            row.setup_seconds = 0.0
                        else:
                            prec = build_preconditioner(
                                system, kind=kind, schur_mode=spec.schur_mode,
                                inner_omega=spec.inner_omega,
                                inner_gamma=spec.inner_gamma,
                                amg_params=spec.amg_params,
                            )
                            row.setup_seconds = time.perf_counter() - t0
                        report = gmres(operator, system.rhs, prec, spec.solver)
                        row.iterations = report.iterations
                        row.converged = report.converged
                        row.residual = report.true_residual
                        row.solve_seconds = report.solve_seconds
                    except Exception as exc:  # keep sweeping, record the failure
                        row.error = f"{type(exc).__name__}: {exc}"
                    rows.append(row)
                    if progress is not None:
                        progress(row)
    return SweepResult(spec=spec, rows=rows)


def _format_value(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        if np.isnan(v):
            return "nan"
        return f"{v:.3e}" if (abs(v) < 1e-3 or abs(v) >= 1e4) and v != 0 else f"{v:.4g}"
    return str(v)


def emit_table(result: SweepResult, fmt: str = "aligned-text") -> str:
    """Render a sweep as csv, aligned-text, or markdown.

    The first two are lossless row dumps. Markdown pivots iteration counts
    into one column per mesh size, one row per parameter pair and
    preconditioner kind, the way robustness tables are usually typeset;
    unconverged entries are starred.
    """
    if fmt == "csv":
        out = io.StringIO()
        import csv

        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SweepRow.FIELDS)
        for row in result.rows:
            writer.writerow([_format_csv(v) for v in row.as_tuple()])
        return out.getvalue()
    if fmt == "aligned-text":
        header = list(SweepRow.FIELDS)
        table = [[_format_value(v) for v in row.as_tuple()] for row in result.rows]
        widths = [max(len(h), *(len(r[i]) for r in table)) if table else len(h)
                  for i, h in enumerate(header)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        for r in table:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        return _emit_markdown(result)
    raise ValueError(f"unknown table format {fmt!r}")


def _format_csv(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return repr(v)
    return v


def _emit_markdown(result: SweepResult) -> str:
    sizes = list(dict.fromkeys(row.n for row in result.rows))
    cells = {}
    order = []
    for row in result.rows:
        key = (row.k_parallel, row.kappa, row.kind)
        if key not in cells:
            cells[key] = {}
            order.append(key)
        mark = str(row.iterations) if row.converged else (
            "fail" if row.error else f"{row.iterations}*"
        )
        cells[key][row.n] = mark
    header = ["K_par", "kappa", "precond"] + [f"n={n}" for n in sizes]
    lines = ["| " + " | ".join(header) + " |",
             "| " + " | ".join("---" for _ in header) + " |"]
    for k_par, kappa, kind in order:
        row = [_format_value(k_par), _format_value(kappa), kind]
        row += [cells[(k_par, kappa, kind)].get(n, "") for n in sizes]
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"
