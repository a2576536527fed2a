"""Finite volume discretization of mixed-dimensional Darcy flow.

Each subdomain carries a two-point flux approximation of its tangential
elliptic equation; each interface carries one mortar flux unknown per mortar
cell, tied to the adjacent pressures by a Darcy-type transmission law. The
result is the two-by-two block system

    [A_oo  A_og] [p]   [f_o]
    [A_go  A_gg] [l] = [f_g]

with pressure unknowns p for all subdomains and mortar fluxes l for all
interfaces. The coupling blocks hold +-1 entries (+ on the higher-dimensional
side, where the mortar flux leaves, - on the lower-dimensional side, where it
enters), the interface rows are scaled by mortar area so that A_og equals the
transpose of A_go exactly, and A_gg is diagonal on matching grids with
entries -area/kappa_eff. The half-cell resistance of the higher-dimensional
neighbor is folded into kappa_eff, which keeps one unknown per mortar cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .grids import DIRICHLET, NEUMANN, DofPartition, MixedDimGrid
from .sparse import CsrMatrix, transpose

__all__ = ["PhysicalParams", "BlockSystem", "assemble", "monolithic"]

ParamValue = Union[float, Mapping[int, float]]


@dataclass(frozen=True)
class PhysicalParams:
    """Material parameters for a mixed-dimensional flow problem.

    Scalars apply uniformly; mappings assign values per subdomain id
    (``matrix_permeability``, ``k_parallel``, ``source``) or per interface id
    (``kappa``) and must cover every object, else :func:`assemble` raises.

    Attributes
    ----------
    matrix_permeability : float or mapping
        Permeability of the ambient-dimensional subdomain(s).
    k_parallel : float or mapping
        Tangential permeability of every lower-dimensional subdomain.
    kappa : float or mapping
        Normal transmissivity of each interface (per unit mortar area).
    aperture : float
        Cross-section scale per dimension gap; a subdomain of codimension c
        gets tangential transmissibilities and volume integrals scaled by
        aperture**c. Unit aperture leaves the system unscaled.
    source : float or mapping
        Per-cell source density; a mapping holds one array per subdomain id.
    """

    matrix_permeability: ParamValue = 1.0
    k_parallel: ParamValue = 1.0
    kappa: ParamValue = 1.0
    aperture: float = 1.0
    source: Union[float, Mapping[int, np.ndarray]] = 0.0


def _lookup(value: ParamValue, key: int, what: str) -> float:
    if isinstance(value, Mapping):
        if key not in value:
            raise ValueError(f"missing {what} for id {key}")
        out = float(value[key])
    else:
        out = float(value)
    if not np.isfinite(out) or out <= 0.0:
        raise ValueError(f"{what} for id {key} must be positive and finite, got {out}")
    return out


@dataclass(frozen=True)
class BlockSystem:
    """The assembled two-by-two block system plus its DOF partition."""

    a_omega_omega: CsrMatrix
    a_omega_gamma: CsrMatrix
    a_gamma_omega: CsrMatrix
    a_gamma_gamma: CsrMatrix
    rhs_omega: np.ndarray
    rhs_gamma: np.ndarray
    partition: DofPartition

    def __post_init__(self):
        no, ng = self.n_omega, self.n_gamma
        shapes = {
            "a_omega_omega": (self.a_omega_omega.shape, (no, no)),
            "a_omega_gamma": (self.a_omega_gamma.shape, (no, ng)),
            "a_gamma_omega": (self.a_gamma_omega.shape, (ng, no)),
            "a_gamma_gamma": (self.a_gamma_gamma.shape, (ng, ng)),
            "rhs_omega": ((len(self.rhs_omega),), (no,)),
            "rhs_gamma": ((len(self.rhs_gamma),), (ng,)),
        }
        for name, (got, want) in shapes.items():
            if got != want:
                raise ValueError(f"{name} has shape {got}, expected {want}")

    @property
    def n_omega(self) -> int:
        return self.partition.n_omega

    @property
    def n_gamma(self) -> int:
        return self.partition.n_gamma

    @property
    def n_total(self) -> int:
        return self.partition.n_total

    @property
    def rhs(self) -> np.ndarray:
        return np.concatenate([self.rhs_omega, self.rhs_gamma])

    def split(self, x: np.ndarray):
        """Split a full-length vector into its omega and gamma parts."""
        x = np.asarray(x)
        if len(x) != self.n_total:
            raise ValueError(f"vector length {len(x)} does not match {self.n_total} dofs")
        return x[: self.n_omega], x[self.n_omega :]


def assemble(grid: MixedDimGrid, params: PhysicalParams) -> BlockSystem:
    """Assemble the block system for a grid and parameter set.

    Subdomain rows are TPFA balances: harmonic-average transmissibilities
    inside each subdomain, Dirichlet boundaries folded into the diagonal and
    right-hand side (which keeps the operator symmetric), Neumann boundaries
    into the right-hand side only, and one +-1 mortar column entry per
    incident mortar cell. Interface rows impose the transmission law with an
    effective transmissivity 1/(1/kappa + 1/t_half), where t_half is the
    per-area half-cell transmissibility of the higher-dimensional neighbor.

    Raises
    ------
    ValueError
        On a missing or nonpositive parameter, including zero kappa.
    """
    part = grid.dof_partition
    n_omega, n_gamma = part.n_omega, part.n_gamma

    # parameter coverage check up front so errors do not depend on topology
    perm = {}
    for s in grid.subdomains:
        which = (
            ("matrix permeability", params.matrix_permeability)
            if s.dim == grid.ambient_dim
            else ("tangential permeability", params.k_parallel)
        )
        perm[s.id] = _lookup(which[1], s.id, which[0])
    kappa = {i.id: _lookup(params.kappa, i.id, "interface transmissivity") for i in grid.interfaces}
    aperture = float(params.aperture)
    if not np.isfinite(aperture) or aperture <= 0:
        raise ValueError(f"aperture must be positive and finite, got {aperture}")

    rows, cols, vals = [], [], []
    rhs_omega = np.zeros(n_omega)

    omega_offset = {sid: start for sid, start, _ in part.omega_ranges}
    gamma_offset = {iid: start - n_omega for iid, start, _ in part.gamma_ranges}

    for s in grid.subdomains:
        off = omega_offset[s.id]
        k = perm[s.id]
        xsec = aperture ** (grid.ambient_dim - s.dim)
        for ca, cb, geo in s.internal_faces:
            t = k * geo * xsec
            rows += [off + ca, off + cb, off + ca, off + cb]
            cols += [off + ca, off + cb, off + cb, off + ca]
            vals += [t, t, -t, -t]
        for c, geo, (kind, value) in s.boundary_faces:
            if kind == DIRICHLET:
                t = k * geo * xsec
                rows.append(off + c)
                cols.append(off + c)
                vals.append(t)
                rhs_omega[off + c] += t * value
            elif kind == NEUMANN:
                rhs_omega[off + c] += value
        if isinstance(params.source, Mapping):
            if s.id not in params.source:
                raise ValueError(f"missing source for id {s.id}")
            f = np.asarray(params.source[s.id], dtype=float)
            if f.shape != (s.cell_count,):
                raise ValueError(
                    f"source for subdomain {s.id} has shape {f.shape}, expected ({s.cell_count},)"
                )
        else:
            f = np.full(s.cell_count, float(params.source))
        rhs_omega[off : off + s.cell_count] += f * np.asarray(s.cell_volumes) * xsec

    cp_rows, cp_cols, cp_vals = [], [], []  # omega-gamma coupling triplets
    gamma_diag = np.zeros(n_gamma)
    sub_by_id = {s.id: s for s in grid.subdomains}
    for itf in grid.interfaces:
        goff = gamma_offset[itf.id]
        hoff = omega_offset[itf.higher_id]
        loff = omega_offset[itf.lower_id]
        k_high = perm[itf.higher_id]
        xsec_high = aperture ** (grid.ambient_dim - sub_by_id[itf.higher_id].dim)
        for m, (hc, geo_h, lc, area) in enumerate(itf.cell_pairs):
            g = goff + m
            cp_rows += [hoff + hc, loff + lc]
            cp_cols += [g, g]
            cp_vals += [1.0, -1.0]
            # per-area half transmissibility of the higher-dim neighbor cell
            t_half = k_high * xsec_high * geo_h / area
            kappa_eff = 1.0 / (1.0 / kappa[itf.id] + 1.0 / t_half)
            gamma_diag[g] = -area / kappa_eff

    a_oo = CsrMatrix.from_coo(n_omega, n_omega, rows, cols, vals)
    a_og = CsrMatrix.from_coo(n_omega, n_gamma, cp_rows, cp_cols, cp_vals)
    a_go = transpose(a_og)
    a_gg = CsrMatrix.from_coo(
        n_gamma, n_gamma, np.arange(n_gamma), np.arange(n_gamma), gamma_diag
    )
    return BlockSystem(a_oo, a_og, a_go, a_gg, rhs_omega, np.zeros(n_gamma), part)


def monolithic(system: BlockSystem) -> CsrMatrix:
    """Concatenate the four blocks into one operator in partition order."""
    import scipy.sparse as sp

    if system.n_gamma == 0:
        return system.a_omega_omega
    stacked = sp.bmat(
        [
            [system.a_omega_omega.to_scipy(), system.a_omega_gamma.to_scipy()],
            [system.a_gamma_omega.to_scipy(), system.a_gamma_gamma.to_scipy()],
        ],
        format="csr",
    )
    return CsrMatrix.from_scipy(stacked)
