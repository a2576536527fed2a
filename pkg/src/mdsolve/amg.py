"""Smoothed-aggregation algebraic multigrid.

Setup builds a hierarchy by strength-filtered greedy aggregation, a
piecewise-constant tentative prolongator smoothed by one damped-Jacobi step,
and Galerkin coarsening. The solve side is a V(1,1) cycle: one forward
Gauss-Seidel pre-smoothing sweep, coarse-grid correction, one backward
Gauss-Seidel post-smoothing sweep, with a dense LU solve on the coarsest
level. One cycle from a zero initial guess is a fixed linear operator, which
is what the block preconditioner uses for its inner solves.

Two special cases are handled transparently: operators whose off-diagonal
part is entirely zero are solved directly (no hierarchy), and operators with
an all-negative diagonal (the interface block as assembled) are negated for
setup, with the cycle solving the original sign convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .sparse import CsrMatrix, SingularMatrixError

__all__ = ["AmgParams", "AmgLevel", "AmgHierarchy", "amg_setup", "v_cycle",
           "apply_preconditioner_vcycle"]


@dataclass(frozen=True)
class AmgParams:
    """Setup parameters, defaults chosen for scalar elliptic operators."""

    strength_threshold: float = 0.08
    max_coarse_size: int = 64
    max_levels: int = 20
    power_iterations: int = 10
    # prolongator smoothing weight is omega_factor / rho(D^-1 A)
    omega_factor: float = 4.0 / 3.0


@dataclass
class AmgLevel:
    """One level: its operator, the prolongator from the next coarser level,
    Gauss-Seidel smoother state, and dense LU factors on the coarsest level."""

    a: CsrMatrix
    p: CsrMatrix | None = None
    _a_scipy: sp.csr_matrix = field(default=None, repr=False)
    _p_scipy: sp.csr_matrix = field(default=None, repr=False)
    _lower: object = field(default=None, repr=False)  # splu of tril(A)
    _upper: object = field(default=None, repr=False)  # splu of triu(A)
    _coarse_lu: tuple | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.a.nrows

    @property
    def is_coarsest(self) -> bool:
        return self._coarse_lu is not None


@dataclass
class AmgHierarchy:
    """Level stack, finest first. ``diagonal`` short-circuits the cycle with
    an exact diagonal solve; ``negated`` records that setup ran on -A."""

    levels: list
    params: AmgParams
    negated: bool = False
    diagonal: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.diagonal) if self.diagonal is not None else self.levels[0].n

    @property
    def operator_complexity(self) -> float:
        if self.diagonal is not None:
            return 1.0
        nnz0 = max(self.levels[0].a.nnz, 1)
        return sum(lev.a.nnz for lev in self.levels) / nnz0

    @property
    def grid_complexity(self) -> float:
        if self.diagonal is not None:
            return 1.0
        return sum(lev.n for lev in self.levels) / max(self.levels[0].n, 1)

    def stats(self) -> dict:
        if self.diagonal is not None:
            return {
                "mode": "diagonal",
                "levels": [{"n": len(self.diagonal), "nnz": len(self.diagonal)}],
                "operator_complexity": 1.0,
                "grid_complexity": 1.0,
                "negated": self.negated,
            }
        return {
            "mode": "multilevel",
            "levels": [{"n": lev.n, "nnz": lev.a.nnz} for lev in self.levels],
            "operator_complexity": self.operator_complexity,
            "grid_complexity": self.grid_complexity,
            "negated": self.negated,
        }

    def describe(self) -> str:
        s = self.stats()
        lines = [f"amg hierarchy ({s['mode']}, negated={s['negated']})"]
        for i, lev in enumerate(s["levels"]):
            lines.append(f"  level {i}: n={lev['n']:>8}  nnz={lev['nnz']:>10}")
        lines.append(
            f"  operator complexity {s['operator_complexity']:.3f}, "
            f"grid complexity {s['grid_complexity']:.3f}"
        )
        return "\n".join(lines)


def _aggregate(a: sp.csr_matrix, theta: float):
    """Greedy aggregation over the strength graph.

    Root sweep first (a free node whose strong neighbors are all free seeds
    an aggregate), then stragglers attach to their most strongly connected
    aggregated neighbor, then leftovers seed aggregates of their own.
    Returns (aggregate id per node, number of aggregates).
    """
    n = a.shape[0]
    diag = a.diagonal()
    rows = np.repeat(np.arange(n), np.diff(a.indptr))
    off = a.indices != rows
    thresh = theta * np.sqrt(np.abs(diag[rows] * diag[a.indices]))
    strong = off & (np.abs(a.data) >= thresh) & (np.abs(a.data) > 0)
    s_mat = sp.csr_matrix(
        (np.abs(a.data[strong]), a.indices[strong], np.insert(np.cumsum(np.bincount(rows[strong], minlength=n)), 0, 0)),
        shape=(n, n),
    )
    indptr, indices, weights = s_mat.indptr, s_mat.indices, s_mat.data

    agg = np.full(n, -1, dtype=np.int64)
    n_agg = 0
    for i in range(n):
        if agg[i] >= 0:
            continue
        nbrs = indices[indptr[i] : indptr[i + 1]]
        if np.all(agg[nbrs] < 0):
            agg[i] = n_agg
            agg[nbrs] = n_agg
            n_agg += 1
    for i in range(n):
        if agg[i] >= 0:
            continue
        nbrs = indices[indptr[i] : indptr[i + 1]]
        w = weights[indptr[i] : indptr[i + 1]]
        best, best_w = -1, -1.0
        for j, wj in zip(nbrs, w):
            if agg[j] >= 0 and wj > best_w:
                best, best_w = agg[j], wj
        if best >= 0:
            agg[i] = best
    for i in range(n):
        if agg[i] >= 0:
            continue
        agg[i] = n_agg
        nbrs = indices[indptr[i] : indptr[i + 1]]
        agg[nbrs[agg[nbrs] < 0]] = n_agg
        n_agg += 1
    return agg, n_agg


def _filtered(a: sp.csr_matrix, theta: float) -> sp.csr_matrix:
    """Drop weak off-diagonal entries and lump them into the diagonal."""
    n = a.shape[0]
    diag = a.diagonal()
    rows = np.repeat(np.arange(n), np.diff(a.indptr))
    off = a.indices != rows
    thresh = theta * np.sqrt(np.abs(diag[rows] * diag[a.indices]))
    weak = off & (np.abs(a.data) < thresh)
    lump = np.zeros(n)
    np.add.at(lump, rows[weak], a.data[weak])
    data = np.where(weak, 0.0, a.data)
    filt = sp.csr_matrix((data, a.indices.copy(), a.indptr.copy()), shape=a.shape)
    return (filt + sp.diags(lump)).tocsr()


def _rho_dinv_a(a: sp.csr_matrix, dinv: np.ndarray, iterations: int) -> float:
    """Spectral radius estimate of D^-1 A by power iteration (seeded, deterministic)."""
    rng = np.random.default_rng(20220601)
    v = rng.standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    rho = 1.0
    for _ in range(iterations):
        w = dinv * (a @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 1.0
        rho = nrm
        v = w / nrm
    return rho


def _triangular_solvers(a: sp.csr_matrix):
    lower = spla.splu(sp.tril(a, 0).tocsc(), permc_spec="NATURAL", diag_pivot_thresh=0.0)
    upper = spla.splu(sp.triu(a, 0).tocsc(), permc_spec="NATURAL", diag_pivot_thresh=0.0)
    return lower, upper


def _coarse_factor(a: sp.csr_matrix):
    dense = a.toarray()
    anorm = np.abs(dense).sum(axis=1).max() if dense.size else 0.0
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(dense)
    if dense.size and np.min(np.abs(np.diag(lu))) <= 1e-14 * anorm:
        raise SingularMatrixError("amg_setup: coarsest-level operator is singular")
    return lu, piv


def amg_setup(a: CsrMatrix, params: AmgParams | None = None) -> AmgHierarchy:
    """Build a smoothed-aggregation hierarchy for a square operator.

    Parameters
    ----------
    a : CsrMatrix
        Square operator, intended for symmetric positive (semi)definite
        M-matrix-like problems. An all-negative diagonal is handled by
        internal negation; a purely diagonal operator skips the hierarchy.
    params : AmgParams, optional

    Raises
    ------
    ValueError
        If the operator is not square or has a zero diagonal entry.
    """
    params = params or AmgParams()
    if a.nrows != a.ncols:
        raise ValueError(f"amg_setup: operator is {a.nrows}x{a.ncols}, not square")
    diag = a.diagonal()
    zero = np.flatnonzero(diag == 0.0)
    if len(zero):
        raise ValueError(f"amg_setup: zero diagonal entry at row {zero[0]}")

    work = a.to_scipy()
    rows = np.repeat(np.arange(a.nrows), np.diff(a.row_ptr))
    off_mask = a.col_idx != rows
    if not np.any(off_mask & (a.values != 0.0)):
        # (block-)diagonal operator: invert directly, no hierarchy needed
        return AmgHierarchy(levels=[], params=params, negated=False, diagonal=diag.copy())

    negated = bool(np.all(diag < 0.0))
    current = (-work).tocsr() if negated else work.copy()

    levels: list[AmgLevel] = []
    for depth in range(params.max_levels):
        n = current.shape[0]
        last = n < params.max_coarse_size or depth == params.max_levels - 1
        if not last:
            agg, n_agg = _aggregate(current, params.strength_threshold)
            if n_agg >= n:
                last = True  # aggregation stalled; stop coarsening here
        if last:
            levels.append(
                AmgLevel(
                    a=CsrMatrix.from_scipy(current),
                    _a_scipy=current,
                    _coarse_lu=_coarse_factor(current),
                )
            )
            break
        p_tent = sp.csr_matrix(
            (np.ones(n), agg, np.arange(n + 1)), shape=(n, n_agg)
        )
        dinv = 1.0 / current.diagonal()
        rho = _rho_dinv_a(current, dinv, params.power_iterations)
        omega = params.omega_factor / max(rho, np.finfo(float).tiny)
        a_filt = _filtered(current, params.strength_threshold)
        p = (p_tent - sp.diags(omega * dinv) @ (a_filt @ p_tent)).tocsr()
        coarse = (p.T @ current @ p).tocsr()
        coarse.sum_duplicates()
        lower, upper = _triangular_solvers(current)
        levels.append(
            AmgLevel(
                a=CsrMatrix.from_scipy(current),
                p=CsrMatrix.from_scipy(p),
                _a_scipy=current,
                _p_scipy=p,
                _lower=lower,
                _upper=upper,
            )
        )
        current = coarse
    return AmgHierarchy(levels=levels, params=params, negated=negated)


def _cycle(levels, depth: int, b: np.ndarray, x: np.ndarray | None) -> np.ndarray:
    lev = levels[depth]
    if lev.is_coarsest:
        return scipy.linalg.lu_solve(lev._coarse_lu, b)
    a = lev._a_scipy
    if x is None:
        x = lev._lower.solve(b)  # forward sweep from a zero guess
    else:
        x = x + lev._lower.solve(b - a @ x)
    resid = b - a @ x
    correction = _cycle(levels, depth + 1, lev._p_scipy.T @ resid, None)
    x = x + lev._p_scipy @ correction
    return x + lev._upper.solve(b - a @ x)


def v_cycle(h: AmgHierarchy, b: np.ndarray, x0: np.ndarray | None = None) -> np.ndarray:
    """One V(1,1) cycle for the hierarchy's operator, starting from ``x0``.

    With ``x0 = 0`` the result is a fixed linear function of ``b``. On a
    single-level (or diagonal) hierarchy this is an exact solve.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or len(b) != h.n:
        raise ValueError(f"v_cycle: right-hand side length {b.shape} does not match n={h.n}")
    if h.diagonal is not None:
        return b / h.diagonal
    if x0 is None:
        x = None
    else:
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape != b.shape:
            raise ValueError("v_cycle: initial guess length mismatch")
        x = x0 if np.any(x0) else None
    return _cycle(h.levels, 0, -b if h.negated else b, x)


def apply_preconditioner_vcycle(h: AmgHierarchy, r: np.ndarray) -> np.ndarray:
    """One V-cycle from a zero initial guess: the fixed linear operator used
    as an inner solve inside the block preconditioner."""
    return v_cycle(h, r, None)
