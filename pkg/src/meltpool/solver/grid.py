"""Uniform structured grid in track units.

Coordinates are dimensionless (lengths in units of l_p). x runs along the
scan direction, y across the track with the origin on the centerline, and z
measures depth downward from the free surface (z = 0 at the top).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..alloys import ProcessCase
from ..errors import ValidationError


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    y_centered: bool = True

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValidationError("grid needs at least one cell per axis")
        if min(self.dx, self.dy, self.dz) <= 0.0:
            raise ValidationError("grid spacings must be positive")

    @classmethod
    def from_case(cls, case: ProcessCase, spacing: float,
                  spacing_z: float | None = None) -> "Grid":
        """Grid covering the case domain; cells are cubic unless spacing_z
        sets a finer vertical step (depth resolves the thinnest scales)."""
        if spacing_z is None:
            spacing_z = spacing
        ex, ey, ez = (e / case.l_p for e in case.domain_extent)
        nx = max(1, round(ex / spacing))
        ny = max(1, round(ey / spacing))
        nz = max(1, round(ez / spacing_z))
        return cls(nx=nx, ny=ny, nz=nz, dx=spacing, dy=spacing, dz=spacing_z)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def extent(self) -> tuple[float, float, float]:
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def origin(self) -> tuple[float, float, float]:
        y0 = -0.5 * self.ny * self.dy if self.y_centered else 0.0
        return (0.0, y0, 0.0)

    @cached_property
    def x_centers(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.nx) + 0.5) * self.dx

    @cached_property
    def y_centers(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.ny) + 0.5) * self.dy

    @cached_property
    def z_centers(self) -> np.ndarray:
        return self.origin[2] + (np.arange(self.nz) + 0.5) * self.dz

    @cached_property
    def x_faces(self) -> np.ndarray:
        return self.origin[0] + np.arange(self.nx + 1) * self.dx

    @cached_property
    def y_faces(self) -> np.ndarray:
        return self.origin[1] + np.arange(self.ny + 1) * self.dy

    @cached_property
    def z_faces(self) -> np.ndarray:
        return self.origin[2] + np.arange(self.nz + 1) * self.dz
