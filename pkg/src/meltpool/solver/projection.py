"""Variable-coefficient pressure projection restricted to the melt.

Only cells with liquid fraction at or above the solid cut participate;
faces the damping step pinned to zero are excluded, which keeps solid
regions exactly rigid and makes the projected field divergence-free at
every cell, active or not. The Poisson operator

    sum_faces d_f (p_cell - p_nbr) / h^2 = -div(u*)

is assembled sparse over the active set and solved directly. Each
connected blob of melt is a singular Neumann problem, so the right-hand
side is mean-shifted and one cell pinned per blob; the pinned row's
original equation is then satisfied identically because rows and the
shifted source both sum to zero within the blob.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from ..errors import SolverError
from .grid import Grid
from .momentum import FaceCoefficients


def project(state, coeffs: FaceCoefficients, grid: Grid, *, phi: np.ndarray,
            phi_solid_cut: float, poisson_tol: float) -> tuple[float, int]:
    """Make the active-region face velocities divergence-free in place.

    Returns (max |div| after correction over the whole grid, active cells).
    """
    active = phi >= phi_solid_cut
    n = int(active.sum())
    if n == 0:
        return 0.0, 0

    ids = np.full(grid.shape, -1, dtype=np.int64)
    ids[active] = np.arange(n)
    dx, dy, dz = grid.dx, grid.dy, grid.dz

    rows = []
    cols = []
    vals = []

    def couple(left_ids, right_ids, weights):
        rows.append(left_ids)
        cols.append(left_ids)
        vals.append(weights)
        rows.append(right_ids)
        cols.append(right_ids)
        vals.append(weights)
        rows.append(left_ids)
        cols.append(right_ids)
        vals.append(-weights)
        rows.append(right_ids)
        cols.append(left_ids)
        vals.append(-weights)

    mu = coeffs.du > 0.0
    if mu.any():
        couple(ids[:-1, :, :][mu], ids[1:, :, :][mu], coeffs.du[mu] / dx ** 2)
    mv = coeffs.dv > 0.0
    if mv.any():
        couple(ids[:, :-1, :][mv], ids[:, 1:, :][mv], coeffs.dv[mv] / dy ** 2)
    mw = coeffs.dw > 0.0
    if mw.any():
        couple(ids[:, :, :-1][mw], ids[:, :, 1:][mw], coeffs.dw[mw] / dz ** 2)

    if rows:
        A = coo_matrix((np.concatenate(vals),
                        (np.concatenate(rows), np.concatenate(cols))),
                       shape=(n, n)).tocsr()
    else:
        A = coo_matrix((n, n)).tocsr()

    rhs = -state.divergence()[active]

    n_comp, labels = connected_components(A, directed=False)
    A = A.tolil()
    for comp in range(n_comp):
        members = np.nonzero(labels == comp)[0]
        rhs[members] -= rhs[members].mean()
        pin = int(members[0])
        A.rows[pin] = [pin]
        A.data[pin] = [1.0]
        rhs[pin] = 0.0
    A = A.tocsc()

    q = splu(A).solve(rhs)
    residual = np.abs(A @ q - rhs).max()
    scale = max(1.0, float(np.abs(rhs).max()))
    if residual > poisson_tol * scale:
        raise SolverError(f"pressure solve residual {residual:.3g} exceeds "
                          f"tolerance {poisson_tol:g} * {scale:.3g}")

    q_full = np.zeros(grid.shape)
    q_full[active] = q
    state.u[1:-1, :, :][mu] -= coeffs.du[mu] * (
        (q_full[1:, :, :] - q_full[:-1, :, :])[mu]) / dx
    state.v[:, 1:-1, :][mv] -= coeffs.dv[mv] * (
        (q_full[:, 1:, :] - q_full[:, :-1, :])[mv]) / dy
    state.w[:, :, 1:-1][mw] -= coeffs.dw[mw] * (
        (q_full[:, :, 1:] - q_full[:, :, :-1])[mw]) / dz
    state.p = q_full

    div_after = float(np.abs(state.divergence()).max())
    return div_after, n
