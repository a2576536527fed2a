"""Factorization-based block preconditioners for the two-by-two system.

The monolithic operator factors as a unit block upper triangle, a block
diagonal of (Schur complement, interface block), and a unit block lower
triangle. Inverting the lower two factors gives the block lower triangular
preconditioner; with the exact Schur complement and exact inner solves the
preconditioned operator equals the unit upper factor, so all its eigenvalues
are one and GMRES converges in two steps. The practical variant replaces the
Schur complement by its diagonal approximation (exact on matching grids,
where the interface block is diagonal) and both inner inverses by one AMG
V-cycle each. Its action is three steps: solve on the subdomain block,
update the interface residual with the coupling block, solve on the
interface block.

Exact-mode preconditioners are dense oracles guarded by a size cap; they
exist to validate the approximate path, not to solve anything large.
"""

from __future__ import annotations

import time

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .assembly import BlockSystem
from .amg import AmgParams, amg_setup, apply_preconditioner_vcycle
from .sparse import (
    CsrMatrix,
    DenseMatrix,
    SingularMatrixError,
    csr_add,
    extract_diagonal,
    triple_product_diag_scaled,
)

__all__ = [
    "KINDS",
    "exact_schur",
    "approx_schur",
    "factorization_factors",
    "BlockPreconditioner",
    "build_preconditioner",
]

KINDS = ("ml", "bl", "bu", "bd")
DEFAULT_ORACLE_CAP = 2000


def _dense_lu(a: np.ndarray, context: str):
    anorm = np.abs(a).sum(axis=1).max() if a.size else 0.0
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(a)
    if a.size and np.min(np.abs(np.diag(lu))) <= 1e-14 * anorm:
        raise SingularMatrixError(f"{context}: matrix is singular to working precision")
    return lu, piv


def exact_schur(system: BlockSystem, oracle_cap: int = DEFAULT_ORACLE_CAP) -> DenseMatrix:
    """Dense Schur complement of the interface block (oracle only).

    Computes A_oo - A_og A_gg^-1 A_go. Refuses systems above the oracle cap
    and singular interface blocks.
    """
    if system.n_total > oracle_cap:
        raise ValueError(
            f"exact_schur: system has {system.n_total} dofs, above the oracle cap {oracle_cap}"
        )
    a_oo = system.a_omega_omega.to_dense()
    if system.n_gamma == 0:
        return DenseMatrix(a_oo)
    lu = _dense_lu(system.a_gamma_gamma.to_dense(), "exact_schur: interface block")
    x = scipy.linalg.lu_solve(lu, system.a_gamma_omega.to_dense())
    return DenseMatrix(a_oo - system.a_omega_gamma.to_dense() @ x)


def approx_schur(system: BlockSystem) -> CsrMatrix:
    """Sparse approximate Schur complement A_oo - A_og diag(A_gg)^-1 A_go.

    Equals the exact Schur complement whenever A_gg is diagonal, which is the
    matching-grid case this package assembles.
    """
    diag = extract_diagonal(system.a_gamma_gamma)
    zero = np.flatnonzero(diag == 0.0)
    if len(zero):
        raise ValueError(
            f"approx_schur: zero diagonal entry in the interface block "
            f"at interface DOF {zero[0]}"
        )
    if system.n_gamma == 0:
        return system.a_omega_omega
    triple = triple_product_diag_scaled(
        system.a_omega_gamma, 1.0 / diag, system.a_gamma_omega
    )
    return csr_add(system.a_omega_omega, triple, -1.0)


def factorization_factors(system: BlockSystem, oracle_cap: int = DEFAULT_ORACLE_CAP):
    """Dense (U, D, L) factors of the monolithic operator (oracle only).

    U is unit block upper triangular with A_og A_gg^-1 in its off-diagonal
    block, D is blockdiag(Schur, A_gg), L is unit block lower triangular with
    A_gg^-1 A_go. Their product reproduces the monolithic matrix.
    """
    if system.n_total > oracle_cap:
        raise ValueError(
            f"factorization_factors: system has {system.n_total} dofs, "
            f"above the oracle cap {oracle_cap}"
        )
    no, ng, nt = system.n_omega, system.n_gamma, system.n_total
    s = exact_schur(system, oracle_cap).values
    u = np.eye(nt)
    d = np.zeros((nt, nt))
    lo = np.eye(nt)
    d[:no, :no] = s
    if ng:
        a_gg = system.a_gamma_gamma.to_dense()
        lu = _dense_lu(a_gg, "factorization_factors: interface block")
        u[:no, no:] = scipy.linalg.lu_solve(lu, system.a_omega_gamma.to_dense().T).T
        lo[no:, :no] = scipy.linalg.lu_solve(lu, system.a_gamma_omega.to_dense())
        d[no:, no:] = a_gg
    return DenseMatrix(u), DenseMatrix(d), DenseMatrix(lo)


class _DirectDense:
    def __init__(self, a: np.ndarray, context: str):
        self._lu = _dense_lu(a, context)

    def __call__(self, r):
        return scipy.linalg.lu_solve(self._lu, r)


class _DirectSparse:
    def __init__(self, a: CsrMatrix):
        self._lu = spla.splu(a.to_scipy().tocsc())

    def __call__(self, r):
        return self._lu.solve(r)


class _AmgSolve:
    def __init__(self, a: CsrMatrix, params: AmgParams | None):
        self.hierarchy = amg_setup(a, params)

    def __call__(self, r):
        return apply_preconditioner_vcycle(self.hierarchy, r)


class BlockPreconditioner:
    """A built block preconditioner; ``apply`` is a fixed linear operator.

    Instances are created by :func:`build_preconditioner`. The setup (Schur
    assembly, inner factorizations or AMG hierarchies) is done once and is
    reusable across right-hand sides. Apply allocates its own scratch, so
    concurrent applications are safe.
    """

    def __init__(self, kind, schur_mode, inner_omega, inner_gamma, n_omega, n_gamma,
                 q_omega, q_gamma, a_gamma_omega, a_omega_gamma, setup_seconds,
                 schur_matrix=None):
        self.kind = kind
        self.schur_mode = schur_mode
        self.inner_omega = inner_omega
        self.inner_gamma = inner_gamma
        self.n_omega = n_omega
        self.n_gamma = n_gamma
        self._q_omega = q_omega
        self._q_gamma = q_gamma
        self._a_gamma_omega = a_gamma_omega.to_scipy()
        self._a_omega_gamma = a_omega_gamma.to_scipy()
        self.setup_seconds = setup_seconds
        self.schur_matrix = schur_matrix

    @property
    def n_total(self) -> int:
        return self.n_omega + self.n_gamma

    def hierarchies(self) -> dict:
        """AMG hierarchies in use, keyed by block name (may be empty)."""
        out = {}
        if isinstance(self._q_omega, _AmgSolve):
            out["schur"] = self._q_omega.hierarchy
        if isinstance(self._q_gamma, _AmgSolve):
            out["interface"] = self._q_gamma.hierarchy
        return out

    def apply(self, r: np.ndarray) -> np.ndarray:
        """Apply the preconditioner to a residual vector.

        For the lower-triangular kinds this is exactly: subdomain solve,
        interface residual update with the coupling block, interface solve.
        The block diagonal kind skips the update; the upper-triangular kind
        mirrors the order using the omega-gamma coupling block.
        """
        r = np.asarray(r, dtype=np.float64)
        if r.ndim != 1 or len(r) != self.n_total:
            raise ValueError(
                f"apply: residual length {r.shape} does not match {self.n_total} dofs"
            )
        r_omega = r[: self.n_omega]
        r_gamma = r[self.n_omega :]
        if self.kind in ("ml", "bl"):
            z_omega = self._q_omega(r_omega)
            r_gamma = r_gamma - self._a_gamma_omega @ z_omega
            z_gamma = self._q_gamma(r_gamma)
        elif self.kind == "bu":
            z_gamma = self._q_gamma(r_gamma)
            r_omega = r_omega - self._a_omega_gamma @ z_gamma
            z_omega = self._q_omega(r_omega)
        else:  # bd
            z_omega = self._q_omega(r_omega)
            z_gamma = self._q_gamma(r_gamma)
        return np.concatenate([z_omega, z_gamma])

    __call__ = apply


def build_preconditioner(
    system: BlockSystem,
    kind: str = "ml",
    schur_mode: str = "diag",
    inner_omega: str = "amg",
    inner_gamma: str = "amg",
    amg_params: AmgParams | None = None,
    oracle_cap: int = DEFAULT_ORACLE_CAP,
) -> BlockPreconditioner:
    """Set up a block preconditioner for an assembled system.

    Parameters
    ----------
    system : BlockSystem
    kind : {"ml", "bl", "bu", "bd"}
        Lower triangular ("ml" and "bl" share the application path), upper
        triangular, or block diagonal.
    schur_mode : {"diag", "exact"}
        Diagonal approximation of the interface block inside the Schur
        complement, or the dense exact Schur complement (oracle only;
        requires direct inner solves and a system below ``oracle_cap``).
    inner_omega, inner_gamma : {"amg", "direct"}
        One AMG V-cycle or an exact factorization per block. AMG on a purely
        diagonal interface block degenerates to the exact diagonal solve.
    amg_params : AmgParams, optional
    """
    if kind not in KINDS:
        raise ValueError(f"unknown preconditioner kind {kind!r}, expected one of {KINDS}")
    if schur_mode not in ("diag", "exact"):
        raise ValueError(f"unknown schur_mode {schur_mode!r}")
    for name, mode in (("inner_omega", inner_omega), ("inner_gamma", inner_gamma)):
        if mode not in ("amg", "direct"):
            raise ValueError(f"unknown {name} {mode!r}")
    if schur_mode == "exact":
        if inner_omega != "direct" or inner_gamma != "direct":
            raise ValueError("schur_mode='exact' is an oracle and requires direct inner solves")
        if system.n_total > oracle_cap:
            raise ValueError(
                f"schur_mode='exact' limited to {oracle_cap} dofs, system has {system.n_total}"
            )

    t0 = time.perf_counter()
    if schur_mode == "exact":
        schur = exact_schur(system, oracle_cap)
        q_omega = _DirectDense(schur.values, "build_preconditioner: Schur block")
        q_gamma = (
            _DirectDense(system.a_gamma_gamma.to_dense(), "build_preconditioner: interface block")
            if system.n_gamma
            else (lambda r: r.copy())
        )
    else:
        schur = approx_schur(system)
        if inner_omega == "direct":
            q_omega = _DirectSparse(schur)
        else:
            q_omega = _AmgSolve(schur, amg_params)
        if system.n_gamma == 0:
            q_gamma = lambda r: r.copy()  # noqa: E731
        elif inner_gamma == "direct":
            q_gamma = _DirectSparse(system.a_gamma_gamma)
        else:
            q_gamma = _AmgSolve(system.a_gamma_gamma, amg_params)
    setup_seconds = time.perf_counter() - t0
    return BlockPreconditioner(
        kind=kind,
        schur_mode=schur_mode,
        inner_omega=inner_omega,
        inner_gamma=inner_gamma,
        n_omega=system.n_omega,
        n_gamma=system.n_gamma,
        q_omega=q_omega,
        q_gamma=q_gamma,
        a_gamma_omega=system.a_gamma_omega,
        a_omega_gamma=system.a_omega_gamma,
        setup_seconds=setup_seconds,
        schur_matrix=schur,
    )
