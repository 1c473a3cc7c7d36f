"""Tentative-velocity update on the staggered grid.

Per substep: explicit upwind advection, buoyancy on the vertical component,
thermocapillary shear as a top-layer stress flux, then a backward-Euler
viscous solve per component (fast transforms in x/y, tridiagonal in z),
and finally porous-drag damping applied face-by-face in closed form,

    u <- u / (1 + dt * C_D * K(phi_face)),

with faces touching any solid cell (face fraction below the cut) pinned to
exactly zero. Those pinned faces are excluded from the pressure projection,
so solid regions stay rigid to machine precision.

Walls: no-slip at the four lateral walls and the bottom plate, shear-driven
free surface on top (no penetration is kept by the zero boundary faces).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dimensionless import DimensionlessSet
from .grid import Grid
from .phase import kozeny_carman
from .spectral import solve_helmholtz


@dataclass
class FaceCoefficients:
    """Pressure-gradient coefficients dt/(1 + dt C_D K) on interior faces.

    Zero marks a rigid face; the projection skips it and leaves the
    velocity there untouched (it is exactly zero already).
    """

    du: np.ndarray
    dv: np.ndarray
    dw: np.ndarray


def face_fractions(phi: np.ndarray):
    """Liquid fraction on interior faces, taken as min of the two cells."""
    return (np.minimum(phi[:-1, :, :], phi[1:, :, :]),
            np.minimum(phi[:, :-1, :], phi[:, 1:, :]),
            np.minimum(phi[:, :, :-1], phi[:, :, 1:]))


def _pad(arr: np.ndarray, axis: int, lo: str, hi: str) -> np.ndarray:
    """Attach one ghost layer per side: 'odd' mirrors through a wall value
    of zero half a cell away, 'even' copies (zero normal gradient)."""
    lo_slice = [slice(None)] * 3
    hi_slice = [slice(None)] * 3
    lo_slice[axis] = slice(0, 1)
    hi_slice[axis] = slice(arr.shape[axis] - 1, arr.shape[axis])
    lo_g = arr[tuple(lo_slice)]
    hi_g = arr[tuple(hi_slice)]
    if lo == "odd":
        lo_g = -lo_g
    if hi == "odd":
        hi_g = -hi_g
    return np.concatenate([lo_g, arr, hi_g], axis=axis)


def _axis_term(ext: np.ndarray, axis: int, h: float,
               vel: np.ndarray) -> np.ndarray:
    """vel * d(ext)/d(axis), upwinded by the sign of vel; `ext` carries one
    extra layer per side along `axis` (ghosts or the staggered neighbours)."""
    n = ext.shape[axis]
    lo = [slice(None)] * 3
    mid = [slice(None)] * 3
    hi = [slice(None)] * 3
    lo[axis] = slice(0, n - 2)
    mid[axis] = slice(1, n - 1)
    hi[axis] = slice(2, n)
    back = (ext[tuple(mid)] - ext[tuple(lo)]) / h
    fwd = (ext[tuple(hi)] - ext[tuple(mid)]) / h
    return vel * np.where(vel > 0.0, back, fwd)


def _z_rows(nz: int, dz: float, am: float, interior_dirichlet: bool):
    off = -am / dz ** 2
    lower = np.full(nz, off)
    upper = np.full(nz, off)
    diag = np.full(nz, 1.0 + 2.0 * am / dz ** 2)
    if not interior_dirichlet and nz > 1:
        diag[0] = 1.0 + am / dz ** 2          # free surface: stress in the RHS
        diag[-1] = 1.0 + 3.0 * am / dz ** 2   # no-slip plate half a cell below
    return lower, diag, upper


def momentum_step(state, phi: np.ndarray, T: np.ndarray, *,
                  numbers: DimensionlessSet, grid: Grid, dt: float,
                  porosity_floor: float, phi_solid_cut: float,
                  shear_override: float | None = None) -> FaceCoefficients:
    """Advance the face velocities in place; returns the projection
    coefficients matching the damping just applied."""
    nx, ny, nz = grid.shape
    dx, dy, dz = grid.dx, grid.dy, grid.dz
    nu = numbers.momentum_viscous
    am = dt * nu
    u0 = state.u.copy()
    v0 = state.v.copy()
    w0 = state.w.copy()

    pu, pv, pw = face_fractions(phi)
    damp = numbers.momentum_damping
    fu = 1.0 / (1.0 + dt * damp * kozeny_carman(pu, porosity_floor))
    fv = 1.0 / (1.0 + dt * damp * kozeny_carman(pv, porosity_floor))
    fw = 1.0 / (1.0 + dt * damp * kozeny_carman(pw, porosity_floor))
    fu[pu < phi_solid_cut] = 0.0
    fv[pv < phi_solid_cut] = 0.0
    fw[pw < phi_solid_cut] = 0.0

    # x component on interior x-faces
    if nx > 1:
        ui = u0[1:-1, :, :]
        V = 0.25 * (v0[:-1, :-1, :] + v0[:-1, 1:, :] + v0[1:, :-1, :] + v0[1:, 1:, :])
        W = 0.25 * (w0[:-1, :, :-1] + w0[:-1, :, 1:] + w0[1:, :, :-1] + w0[1:, :, 1:])
        adv = _axis_term(u0, 0, dx, ui)
        adv += _axis_term(_pad(ui, 1, "odd", "odd"), 1, dy, V)
        adv += _axis_term(_pad(ui, 2, "even", "odd"), 2, dz, W)
        rhs = ui - dt * adv
        stress = shear_override
        if stress is None:
            grad = (T[1:, :, 0] - T[:-1, :, 0]) / dx
            stress = -numbers.sign_dgamma * numbers.marangoni_shear * grad
        liquid_top = pu[:, :, 0] >= phi_solid_cut
        rhs[:, :, 0] = rhs[:, :, 0] - np.where(liquid_top, am * stress / dz, 0.0)
        zl, zd, zu = _z_rows(nz, dz, am, interior_dirichlet=False)
        sol = solve_helmholtz(rhs, am, "dst1", "dst2", dx, dy, zl, zd, zu)
        state.u[1:-1, :, :] = sol * fu

    # y component on interior y-faces
    if ny > 1:
        vi = v0[:, 1:-1, :]
        U = 0.25 * (u0[:-1, :-1, :] + u0[1:, :-1, :] + u0[:-1, 1:, :] + u0[1:, 1:, :])
        W = 0.25 * (w0[:, :-1, :-1] + w0[:, :-1, 1:] + w0[:, 1:, :-1] + w0[:, 1:, 1:])
        adv = _axis_term(_pad(vi, 0, "odd", "odd"), 0, dx, U)
        adv += _axis_term(v0, 1, dy, vi)
        adv += _axis_term(_pad(vi, 2, "even", "odd"), 2, dz, W)
        rhs = vi - dt * adv
        if shear_override is None:
            grad = (T[:, 1:, 0] - T[:, :-1, 0]) / dy
            stress = -numbers.sign_dgamma * numbers.marangoni_shear * grad
            liquid_top = pv[:, :, 0] >= phi_solid_cut
            rhs[:, :, 0] = rhs[:, :, 0] - np.where(liquid_top, am * stress / dz, 0.0)
        zl, zd, zu = _z_rows(nz, dz, am, interior_dirichlet=False)
        sol = solve_helmholtz(rhs, am, "dst2", "dst1", dx, dy, zl, zd, zu)
        state.v[:, 1:-1, :] = sol * fv

    # z component on interior z-faces (z points down, so thermal expansion
    # pushes fluid toward negative w)
    if nz > 1:
        wi = w0[:, :, 1:-1]
        U = 0.25 * (u0[:-1, :, :-1] + u0[:-1, :, 1:] + u0[1:, :, :-1] + u0[1:, :, 1:])
        V = 0.25 * (v0[:, :-1, :-1] + v0[:, :-1, 1:] + v0[:, 1:, :-1] + v0[:, 1:, 1:])
        adv = _axis_term(_pad(wi, 0, "odd", "odd"), 0, dx, U)
        adv += _axis_term(_pad(wi, 1, "odd", "odd"), 1, dy, V)
        adv += _axis_term(w0, 2, dz, wi)
        T_face = 0.5 * (T[:, :, :-1] + T[:, :, 1:])
        lift = np.maximum(T_face - numbers.T_tilde_solidus, 0.0)
        rhs = wi - dt * adv - dt * numbers.momentum_buoyancy * lift
        zl, zd, zu = _z_rows(nz - 1, dz, am, interior_dirichlet=True)
        sol = solve_helmholtz(rhs, am, "dst2", "dst2", dx, dy, zl, zd, zu)
        state.w[:, :, 1:-1] = sol * fw

    return FaceCoefficients(du=dt * fu, dv=dt * fv, dw=dt * fw)
