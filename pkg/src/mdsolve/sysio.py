"""Block system exchange on disk.

A system is stored as a directory of four coordinate Matrix Market files,
two array-format right-hand side files, and a JSON sidecar recording the DOF
partition. The writer emits full-precision values, so an export/import round
trip reproduces every block bit for bit. Import validates the sidecar
against the matrices and the exact-transpose contract between the two
coupling blocks, so externally generated systems are checked before any
solve touches them.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .assembly import BlockSystem
from .grids import DofPartition
from .sparse import (
    read_matrix_market,
    read_vector_market,
    transpose,
    write_matrix_market,
    write_vector_market,
)

__all__ = ["export_system", "import_system", "SIDECAR_NAME"]

SIDECAR_NAME = "system.json"

_FILES = {
    "a_omega_omega": "a_omega_omega.mtx",
    "a_omega_gamma": "a_omega_gamma.mtx",
    "a_gamma_omega": "a_gamma_omega.mtx",
    "a_gamma_gamma": "a_gamma_gamma.mtx",
    "rhs_omega": "rhs_omega.mtx",
    "rhs_gamma": "rhs_gamma.mtx",
}


def export_system(system: BlockSystem, directory) -> Path:
    """Write all blocks, right-hand sides and the partition sidecar.

    Returns the directory path. Existing files are overwritten.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix_market(directory / _FILES["a_omega_omega"], system.a_omega_omega)
    write_matrix_market(directory / _FILES["a_omega_gamma"], system.a_omega_gamma)
    write_matrix_market(directory / _FILES["a_gamma_omega"], system.a_gamma_omega)
    write_matrix_market(directory / _FILES["a_gamma_gamma"], system.a_gamma_gamma)
    write_vector_market(directory / _FILES["rhs_omega"], system.rhs_omega)
    write_vector_market(directory / _FILES["rhs_gamma"], system.rhs_gamma)
    sidecar = {
        "format": "mdsolve-block-system",
        "version": 1,
        "n_omega": system.n_omega,
        "n_gamma": system.n_gamma,
        "omega_ranges": [list(r) for r in system.partition.omega_ranges],
        "gamma_ranges": [list(r) for r in system.partition.gamma_ranges],
        "files": dict(_FILES),
    }
    (directory / SIDECAR_NAME).write_text(json.dumps(sidecar, indent=2) + "\n")
    return directory


def import_system(directory) -> BlockSystem:
    """Read a previously exported (or externally produced) block system.

    Raises
    ------
    ValueError
        Naming the mismatch if the sidecar partition does not sum to the
        matrix sizes, if block shapes disagree, or if the coupling blocks
        are not exact transposes of each other.
    """
    directory = Path(directory)
    sidecar_path = directory / SIDECAR_NAME
    if not sidecar_path.exists():
        raise ValueError(f"no sidecar {SIDECAR_NAME} in {directory}")
    meta = json.loads(sidecar_path.read_text())
    if meta.get("format") != "mdsolve-block-system":
        raise ValueError(f"sidecar format {meta.get('format')!r} is not a block system")
    files = meta.get("files", _FILES)

    blocks = {key: read_matrix_market(directory / files[key]) for key in
              ("a_omega_omega", "a_omega_gamma", "a_gamma_omega", "a_gamma_gamma")}
    rhs_omega = read_vector_market(directory / files["rhs_omega"])
    rhs_gamma = read_vector_market(directory / files["rhs_gamma"])

    n_omega = int(meta["n_omega"])
    n_gamma = int(meta["n_gamma"])
    omega_ranges = tuple(tuple(int(v) for v in r) for r in meta["omega_ranges"])
    gamma_ranges = tuple(tuple(int(v) for v in r) for r in meta["gamma_ranges"])
    partition = DofPartition(omega_ranges, gamma_ranges)

    omega_sum = sum(stop - start for _, start, stop in omega_ranges)
    gamma_sum = sum(stop - start for _, start, stop in gamma_ranges)
    if omega_sum != n_omega:
        raise ValueError(
            f"sidecar omega ranges sum to {omega_sum} dofs but n_omega = {n_omega}"
        )
    if gamma_sum != n_gamma:
        raise ValueError(
            f"sidecar gamma ranges sum to {gamma_sum} dofs but n_gamma = {n_gamma}"
        )
    if blocks["a_omega_omega"].shape != (n_omega, n_omega):
        raise ValueError(
            f"a_omega_omega has shape {blocks['a_omega_omega'].shape}, "
            f"sidecar partition implies ({n_omega}, {n_omega})"
        )
    partition.validate()

    got = blocks["a_omega_gamma"]
    want = transpose(blocks["a_gamma_omega"])
    if got != want:
        raise ValueError(
            "a_omega_gamma is not the exact transpose of a_gamma_omega; "
            "this importer only accepts systems honoring that contract"
        )
    return BlockSystem(
        a_omega_omega=blocks["a_omega_omega"],
        a_omega_gamma=blocks["a_omega_gamma"],
        a_gamma_omega=blocks["a_gamma_omega"],
        a_gamma_gamma=blocks["a_gamma_gamma"],
        rhs_omega=rhs_omega,
        rhs_gamma=rhs_gamma,
        partition=partition,
    )
