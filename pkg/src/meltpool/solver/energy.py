"""Semi-implicit energy update with phase-change source iteration.

Each substep solves, backward-Euler in the diffusive part,

    (I - (dt/Pe) Lap) T_new = T_old - dt div(u T_old) + dt S
                              - (Tc/Ste) (phi_it - phi_old + dt div(u phi_it))

with upwind flux-form advection (exactly conservative for the divergence-free
face velocities it is given), the volumetric deposit S, and the latent sink
iterated to consistency: phi_it starts from the stored fraction and is
re-estimated after each solve until the sup-norm change drops below the
tolerance. Re-evaluating the fraction directly from the new temperature
diverges whenever (Tc/Ste) d(phi)/dT exceeds one, so the next iterate comes
from a cell-local implicit balance instead: T + s (phi(T) - phi_it) = T_solve
with s the latent coefficient times the diagonal response of the linear
operator. The fixed point does not depend on s. The temperature/fraction pair
returned is the one that satisfies the discrete balance exactly, so summed
enthalpy tracks the summed deposit to round-off on insulated runs.

Boundaries: lateral walls adiabatic; top face carries the linearized
convective + radiative loss (implicit) plus an optional uniform influx;
bottom is either a preheat Dirichlet plate or adiabatic (insulated mode).
"""

from __future__ import annotations

import warnings

import numpy as np

from ..dimensionless import DimensionlessSet
from ..errors import SolverError
from .grid import Grid
from .phase import liquid_fraction
from .spectral import solve_helmholtz


def upwind_flux_divergence(field: np.ndarray, u: np.ndarray, v: np.ndarray,
                           w: np.ndarray, grid: Grid) -> np.ndarray:
    """div(velocity * field) with first-order upwind face values.

    Domain-boundary faces carry zero velocity, so their fluxes vanish and
    the discrete sum over all cells telescopes to zero.
    """
    nx, ny, nz = grid.shape
    out = np.zeros(grid.shape)
    if nx > 1:
        ui = u[1:-1, :, :]
        flux = np.where(ui > 0.0, field[:-1, :, :], field[1:, :, :]) * ui
        out[:-1, :, :] += flux / grid.dx
        out[1:, :, :] -= flux / grid.dx
    if ny > 1:
        vi = v[:, 1:-1, :]
        flux = np.where(vi > 0.0, field[:, :-1, :], field[:, 1:, :]) * vi
        out[:, :-1, :] += flux / grid.dy
        out[:, 1:, :] -= flux / grid.dy
    if nz > 1:
        wi = w[:, :, 1:-1]
        flux = np.where(wi > 0.0, field[:, :, :-1], field[:, :, 1:]) * wi
        out[:, :, :-1] += flux / grid.dz
        out[:, :, 1:] -= flux / grid.dz
    return out


def _z_rows(nz: int, dz: float, a: float, loss: float, dt: float,
            bottom_T: float | None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tridiagonal z-part of (I - a Lap_z) with loss/Dirichlet boundary rows."""
    if nz == 1:
        if bottom_T is not None:
            raise SolverError("bottom Dirichlet plate needs nz >= 2")
        return (np.zeros(1), np.array([1.0 + dt * loss / dz]), np.zeros(1))
    off = -a / dz ** 2
    lower = np.full(nz, off)
    upper = np.full(nz, off)
    diag = np.full(nz, 1.0 + 2.0 * a / dz ** 2)
    diag[0] = 1.0 + a / dz ** 2 + dt * loss / dz
    if bottom_T is None:
        diag[-1] = 1.0 + a / dz ** 2
    else:
        # ghost cell mirrored through the plate value: T_ghost = 2 T_b - T_last
        diag[-1] = 1.0 + 3.0 * a / dz ** 2
    return lower, diag, upper


def _implicit_fraction(T_lin: np.ndarray, phi_it: np.ndarray, s: float,
                       numbers: DimensionlessSet,
                       mushy_lambda: float) -> np.ndarray:
    """Next fraction iterate from the cell-local implicit balance.

    Solves T + s (phi(T) - phi_it) = T_lin per cell with safeguarded Newton;
    the left side is strictly increasing in T, and the root stays inside
    [T_lin - s (1 - phi_it), T_lin + s phi_it] because phi is bounded.
    """
    if s == 0.0:
        return liquid_fraction(T_lin, numbers, mushy_lambda)
    target = T_lin + s * phi_it
    lo = target - s
    hi = target.copy()
    T = np.clip(T_lin, lo, hi)
    slope = mushy_lambda / numbers.Tc
    for _ in range(60):
        phi = liquid_fraction(T, numbers, mushy_lambda)
        resid = T + s * phi - target
        if float(np.max(np.abs(resid))) < 1e-13:
            break
        np.copyto(hi, T, where=resid > 0.0)
        np.copyto(lo, T, where=resid < 0.0)
        T = np.clip(T - resid / (1.0 + s * 2.0 * slope * phi * (1.0 - phi)),
                    lo, hi)
    return liquid_fraction(T, numbers, mushy_lambda)


def energy_step(T: np.ndarray, phi_old: np.ndarray, u, v, w, *,
                numbers: DimensionlessSet, grid: Grid, dt: float,
                source: np.ndarray | None, mushy_lambda: float,
                insulated: bool = False, bottom_T: float | None = None,
                top_flux: float = 0.0, latent_tol: float = 1e-6,
                latent_max_iter: int = 50, latent_strict: bool = False,
                diffusion_scale: float = 1.0):
    """Advance (T, phi) by one substep; returns (T_new, phi_used, iters)."""
    a = diffusion_scale * dt / numbers.Pe
    loss = 0.0 if insulated else numbers.surface_loss
    if insulated:
        bottom_T = None
    c_lat = numbers.latent_coefficient
    zl, zd, zu = _z_rows(grid.nz, grid.dz, a, loss, dt, bottom_T)

    base = T - dt * upwind_flux_divergence(T, u, v, w, grid)
    if source is not None:
        base += dt * source
    if top_flux != 0.0:
        base[:, :, 0] += dt * top_flux / grid.dz
    if bottom_T is not None:
        base[:, :, -1] += 2.0 * a * bottom_T / grid.dz ** 2

    # interior Jacobi diagonal of (I - a Lap); any positive value leaves the
    # fixed point unchanged, this one makes the update contractive
    ell = 1.0 / (1.0 + 2.0 * a * (1.0 / grid.dx ** 2 + 1.0 / grid.dy ** 2
                                  + 1.0 / grid.dz ** 2))

    phi_it = phi_old
    T_new = T
    iters = 0
    for iters in range(1, latent_max_iter + 1):
        latent = phi_it - phi_old + dt * upwind_flux_divergence(phi_it, u, v, w, grid)
        rhs = base - c_lat * latent
        T_new = solve_helmholtz(rhs, a, "dct2", "dct2", grid.dx, grid.dy,
                                zl, zd, zu)
        phi_next = _implicit_fraction(T_new, phi_it, c_lat * ell, numbers,
                                      mushy_lambda)
        delta = float(np.max(np.abs(phi_next - phi_it)))
        if delta < latent_tol:
            return T_new, phi_it, iters
        phi_it = phi_next
    message = (f"phase-change iteration did not reach {latent_tol:g} "
               f"in {latent_max_iter} sweeps (last change {delta:.3g})")
    if latent_strict:
        raise SolverError(message)
    warnings.warn(message, RuntimeWarning, stacklevel=2)
    return T_new, phi_it, iters
