"""Shared test helpers: model problems and random matrix factories."""

import numpy as np
import scipy.sparse as sp

from mdsolve.sparse import CsrMatrix


def poisson1d(n: int) -> CsrMatrix:
    """Tridiagonal (-1, 2, -1) operator."""
    return CsrMatrix.from_scipy(
        sp.diags([2.0 * np.ones(n), -np.ones(n - 1), -np.ones(n - 1)], [0, -1, 1]).tocsr()
    )


def poisson2d(nx: int, ny: int) -> CsrMatrix:
    """Five-point Laplacian stencil on an nx-by-ny grid, Dirichlet-eliminated."""
    n = nx * ny
    main = 4.0 * np.ones(n)
    off = -1.0 * np.ones(n - 1)
    for row in range(1, ny):
        off[row * nx - 1] = 0.0
    a = sp.diags([main, off, off], [0, -1, 1]) + sp.diags(
        [-np.ones(n - nx), -np.ones(n - nx)], [-nx, nx]
    )
    return CsrMatrix.from_scipy(a.tocsr())


def random_csr(rng: np.random.Generator, nrows: int, ncols: int, density: float = 0.3) -> CsrMatrix:
    """Seeded random sparse matrix built from raw triplets."""
    nnz = max(1, int(nrows * ncols * density))
    rows = rng.integers(0, nrows, size=nnz)
    cols = rng.integers(0, ncols, size=nnz)
    vals = rng.standard_normal(nnz)
    return CsrMatrix.from_coo(nrows, ncols, rows, cols, vals)


def random_spd_dense(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return m @ m.T + n * np.eye(n)
