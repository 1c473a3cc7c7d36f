"""Simulation state: cell-centered scalars plus staggered face velocities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid


@dataclass
class SimState:
    """Fields of one run. Velocities live on faces (MAC layout): u on x-faces
    (nx+1, ny, nz), v on y-faces, w on z-faces; domain-boundary faces are
    impermeable/no-slip and stay exactly zero. Scalars are cell-centered.
    """

    grid: Grid
    T: np.ndarray            # reduced temperature
    phi: np.ndarray          # liquid fraction as used by the last energy solve
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p: np.ndarray            # reduced pressure (0 outside the flow region)
    t_tilde: float = 0.0
    step: int = 0

    @classmethod
    def initial(cls, grid: Grid, T0: float, phi0: np.ndarray) -> "SimState":
        shape = grid.shape
        return cls(
            grid=grid,
            T=np.full(shape, T0, dtype=float),
            phi=phi0.astype(float),
            u=np.zeros((grid.nx + 1, grid.ny, grid.nz)),
            v=np.zeros((grid.nx, grid.ny + 1, grid.nz)),
            w=np.zeros((grid.nx, grid.ny, grid.nz + 1)),
            p=np.zeros(shape),
        )

    def cell_velocity(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Face velocities averaged to cell centers."""
        uc = 0.5 * (self.u[:-1, :, :] + self.u[1:, :, :])
        vc = 0.5 * (self.v[:, :-1, :] + self.v[:, 1:, :])
        wc = 0.5 * (self.w[:, :, :-1] + self.w[:, :, 1:])
        return uc, vc, wc

    def speed(self) -> np.ndarray:
        uc, vc, wc = self.cell_velocity()
        return np.sqrt(uc * uc + vc * vc + wc * wc)

    def max_face_speed(self) -> float:
        return max(float(np.abs(self.u).max()), float(np.abs(self.v).max()),
                   float(np.abs(self.w).max()))

    def divergence(self) -> np.ndarray:
        """Discrete finite-volume divergence from face fluxes."""
        g = self.grid
        return ((self.u[1:, :, :] - self.u[:-1, :, :]) / g.dx
                + (self.v[:, 1:, :] - self.v[:, :-1, :]) / g.dy
                + (self.w[:, :, 1:] - self.w[:, :, :-1]) / g.dz)


@dataclass
class ProbeSeries:
    """Per-outer-step scalar history recorded during a run."""

    step: list[int] = field(default_factory=list)
    t_tilde: list[float] = field(default_factory=list)
    Tmax_tilde: list[float] = field(default_factory=list)
    vmax_tilde: list[float] = field(default_factory=list)
    melt_cells: list[int] = field(default_factory=list)
    div_max: list[float] = field(default_factory=list)
    vmax_face: list[float] = field(default_factory=list)

    def record(self, step: int, t: float, Tmax: float, vmax: float,
               cells: int, div_max: float, vmax_face: float) -> None:
        self.step.append(step)
        self.t_tilde.append(t)
        self.Tmax_tilde.append(Tmax)
        self.vmax_tilde.append(vmax)
        self.melt_cells.append(cells)
        self.div_max.append(div_max)
        self.vmax_face.append(vmax_face)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "step": np.asarray(self.step, dtype=int),
            "t_tilde": np.asarray(self.t_tilde),
            "Tmax_tilde": np.asarray(self.Tmax_tilde),
            "vmax_tilde": np.asarray(self.vmax_tilde),
            "melt_cells": np.asarray(self.melt_cells, dtype=int),
            "div_max": np.asarray(self.div_max),
            "vmax_face": np.asarray(self.vmax_face),
        }
