"""Fast direct solvers for constant-coefficient Helmholtz problems.

Solves (I - a * Laplacian) X = B on uniform grids by diagonalizing the x and
y parts of the operator with real trigonometric transforms and running a
batched tridiagonal solve along z, where boundary rows are free-form (Robin,
Dirichlet ghost, flux sources live in the right-hand side).

Transform kinds and the boundary condition each one encodes:

``dct2``  homogeneous Neumann at half-point boundaries (cell-centered walls)
``dst2``  homogeneous Dirichlet at half-point boundaries (no-slip walls)
``dst1``  homogeneous Dirichlet on boundary nodes (values stored on faces)

Eigenvalues are those of the standard second-difference operator with the
matching ghost convention, so the solves are exact to round-off.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct, idct, dst, idst


def eigenvalues(kind: str, n: int, h: float) -> np.ndarray:
    """Laplacian eigenvalues (all <= 0) for one transformed axis."""
    if kind == "dct2":
        k = np.arange(n)
        return (2.0 * np.cos(np.pi * k / n) - 2.0) / h ** 2
    if kind == "dst2":
        k = np.arange(n)
        return (2.0 * np.cos(np.pi * (k + 1) / n) - 2.0) / h ** 2
    if kind == "dst1":
        k = np.arange(1, n + 1)
        return (2.0 * np.cos(np.pi * k / (n + 1)) - 2.0) / h ** 2
    raise ValueError(f"unknown transform kind {kind!r}")


def forward(arr: np.ndarray, kind: str, axis: int) -> np.ndarray:
    if kind == "dct2":
        return dct(arr, type=2, axis=axis)
    if kind == "dst2":
        return dst(arr, type=2, axis=axis)
    if kind == "dst1":
        return dst(arr, type=1, axis=axis)
    raise ValueError(f"unknown transform kind {kind!r}")


def inverse(arr: np.ndarray, kind: str, axis: int) -> np.ndarray:
    if kind == "dct2":
        return idct(arr, type=2, axis=axis)
    if kind == "dst2":
        return idst(arr, type=2, axis=axis)
    if kind == "dst1":
        return idst(arr, type=1, axis=axis)
    raise ValueError(f"unknown transform kind {kind!r}")


def thomas(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray,
           rhs: np.ndarray) -> np.ndarray:
    """Tridiagonal solve along the last axis; inputs broadcast against rhs.

    No pivoting: rows must be diagonally dominant, which holds for every
    operator assembled here (unit diagonal plus a positive diffusion shift).
    """
    n = rhs.shape[-1]
    lower, diag, upper = (np.broadcast_to(c, rhs.shape) for c in (lower, diag, upper))
    cp = np.empty_like(rhs)
    dp = np.empty_like(rhs)
    cp[..., 0] = upper[..., 0] / diag[..., 0]
    dp[..., 0] = rhs[..., 0] / diag[..., 0]
    for i in range(1, n):
        m = diag[..., i] - lower[..., i] * cp[..., i - 1]
        cp[..., i] = upper[..., i] / m
        dp[..., i] = (rhs[..., i] - lower[..., i] * dp[..., i - 1]) / m
    x = np.empty_like(rhs)
    x[..., -1] = dp[..., -1]
    for i in range(n - 2, -1, -1):
        x[..., i] = dp[..., i] - cp[..., i] * x[..., i + 1]
    return x


def solve_helmholtz(rhs: np.ndarray, a: float, kind_x: str, kind_y: str,
                    hx: float, hy: float,
                    z_lower: np.ndarray, z_diag: np.ndarray,
                    z_upper: np.ndarray) -> np.ndarray:
    """Solve (I - a Lx - a Ly + Zop) X = B with Zop given as tridiagonal rows.

    z_diag/z_lower/z_upper are length-nz rows of the full z-part of the
    operator (identity included); the x/y parts add a * |lambda| to the
    diagonal per transformed mode.
    """
    nx, ny, nz = rhs.shape
    work = forward(forward(rhs, kind_x, 0), kind_y, 1)
    shift = a * (-eigenvalues(kind_x, nx, hx))[:, None, None] \
        + a * (-eigenvalues(kind_y, ny, hy))[None, :, None]
    diag = z_diag[None, None, :] + shift
    work = thomas(z_lower[None, None, :], diag, z_upper[None, None, :], work)
    return inverse(inverse(work, kind_y, 1), kind_x, 0)
