"""Meltpool morphology and solidification measures from finished fields.

Extents are axis-aligned bounds of the region at or above the liquid
threshold, sharpened by linear interpolation of the threshold crossing
between neighbouring cell centers; where the region touches the domain
boundary the extent snaps to the boundary face. The gradient magnitude
uses central differences inside and one-sided differences on the
boundary layers. All functions are pure.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alloys import AlloyProperties, ProcessCase
from .dimensionless import DimensionlessSet, compute_numbers
from .errors import ValidationError
from .solver.grid import Grid

SDAS_PREFACTOR_UM = 25.0
SDAS_EXPONENT = -0.28

METRICS_COLUMNS = ("alloy", "P_W", "v_p", "Tmax_t", "vmax_t", "Gmax_t",
                   "G_K_per_m", "coolrate_K_per_s", "l_m", "w_m", "d_m",
                   "aspect", "volume", "sdas_um")


@dataclass(frozen=True)
class MeltpoolMetrics:
    Tmax_tilde: float
    vmax_tilde: float
    Gmax_tilde: float
    l_m: float                    # extents in deposit-thickness units
    w_m: float
    d_m: float
    aspect_ratio: float | None    # None when the pool has no width
    volume: float
    melt_cell_volume: float
    G_dim: float                  # K/m
    cooling_rate: float           # K/s
    sdas_um: float | None

    def as_dict(self) -> dict:
        return {
            "Tmax_tilde": self.Tmax_tilde,
            "vmax_tilde": self.vmax_tilde,
            "Gmax_tilde": self.Gmax_tilde,
            "l_m": self.l_m,
            "w_m": self.w_m,
            "d_m": self.d_m,
            "aspect_ratio": self.aspect_ratio,
            "volume": self.volume,
            "melt_cell_volume": self.melt_cell_volume,
            "G_dim": self.G_dim,
            "cooling_rate": self.cooling_rate,
            "sdas_um": self.sdas_um,
        }


def _axis_extent(phi: np.ndarray, axis: int, centers: np.ndarray,
                 faces: np.ndarray, h: float, threshold: float) -> float:
    """Bounding extent of the phi >= threshold set along one axis."""
    arr = np.moveaxis(phi, axis, 0)
    above = arr >= threshold
    if not above.any():
        return 0.0
    lows = []
    highs = []
    if above[0].any():
        lows.append(float(faces[0]))
    if above[-1].any():
        highs.append(float(faces[-1]))
    enter = ~above[:-1] & above[1:]
    leave = above[:-1] & ~above[1:]
    idx, *_ = np.nonzero(enter)
    if idx.size:
        frac = (threshold - arr[:-1][enter]) / (arr[1:][enter] - arr[:-1][enter])
        lows.append(float((centers[idx] + h * frac).min()))
    idx, *_ = np.nonzero(leave)
    if idx.size:
        frac = (threshold - arr[:-1][leave]) / (arr[1:][leave] - arr[:-1][leave])
        highs.append(float((centers[idx] + h * frac).max()))
    return max(highs) - min(lows)


def meltpool_extent(phi: np.ndarray, grid: Grid,
                    threshold: float = 0.5) -> tuple[float, float, float, float]:
    """(length, width, depth, summed cell volume) of the molten region."""
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must be in (0, 1), got {threshold}")
    melt_cells = int((phi >= threshold).sum())
    if melt_cells == 0:
        return 0.0, 0.0, 0.0, 0.0
    l_m = _axis_extent(phi, 0, grid.x_centers, grid.x_faces, grid.dx, threshold)
    w_m = _axis_extent(phi, 1, grid.y_centers, grid.y_faces, grid.dy, threshold)
    d_m = _axis_extent(phi, 2, grid.z_centers, grid.z_faces, grid.dz, threshold)
    return l_m, w_m, d_m, melt_cells * grid.cell_volume


def _axis_gradient(T: np.ndarray, h: float, axis: int) -> np.ndarray:
    arr = np.moveaxis(T, axis, 0)
    g = np.zeros_like(arr)
    if arr.shape[0] >= 2:
        g[1:-1] = (arr[2:] - arr[:-2]) / (2.0 * h)
        g[0] = (arr[1] - arr[0]) / h
        g[-1] = (arr[-1] - arr[-2]) / h
    return np.moveaxis(g, 0, axis)


def gradient_max(T: np.ndarray, grid: Grid) -> float:
    """Max gradient-magnitude over cells, central differences inside."""
    gx = _axis_gradient(T, grid.dx, 0)
    gy = _axis_gradient(T, grid.dy, 1)
    gz = _axis_gradient(T, grid.dz, 2)
    return float(np.sqrt(gx * gx + gy * gy + gz * gz).max())


def cooling_rate(G_dim: float, v_p: float) -> float:
    """K/s from gradient magnitude (K/m) and scan speed (m/s)."""
    return G_dim * v_p


def sdas(rate: float) -> float:
    """Secondary dendrite arm spacing in microns from cooling rate in K/s."""
    if rate <= 0.0:
        raise ValidationError(f"cooling rate must be positive, got {rate}")
    return SDAS_PREFACTOR_UM * rate ** SDAS_EXPONENT


def extract(state, alloy: AlloyProperties, case: ProcessCase, *,
            numbers: DimensionlessSet | None = None,
            threshold: float = 0.5) -> MeltpoolMetrics:
    """All morphology measures from a finished state (final-field maxima)."""
    if numbers is None:
        numbers = compute_numbers(alloy, case)
    grid = state.grid
    l_m, w_m, d_m, mcv = meltpool_extent(state.phi, grid, threshold)
    Gmax_tilde = gradient_max(state.T, grid)
    G_dim = Gmax_tilde * numbers.dT_ref / case.l_p
    rate = cooling_rate(G_dim, case.v_p)
    return MeltpoolMetrics(
        Tmax_tilde=float(state.T.max()),
        vmax_tilde=float(state.speed().max()),
        Gmax_tilde=Gmax_tilde,
        l_m=l_m,
        w_m=w_m,
        d_m=d_m,
        aspect_ratio=(l_m / w_m) if w_m > 0.0 else None,
        volume=l_m * w_m * d_m,
        melt_cell_volume=mcv,
        G_dim=G_dim,
        cooling_rate=rate,
        sdas_um=sdas(rate) if rate > 0.0 else None,
    )


def metrics_row(alloy_name: str, case: ProcessCase,
                metrics: MeltpoolMetrics) -> list:
    def opt(value):
        return f"{value:.9g}" if value is not None else "nan"

    return [alloy_name, f"{case.P:g}", f"{case.v_p:g}",
            f"{metrics.Tmax_tilde:.9g}", f"{metrics.vmax_tilde:.9g}",
            f"{metrics.Gmax_tilde:.9g}", f"{metrics.G_dim:.9g}",
            f"{metrics.cooling_rate:.9g}", f"{metrics.l_m:.9g}",
            f"{metrics.w_m:.9g}", f"{metrics.d_m:.9g}",
            opt(metrics.aspect_ratio), f"{metrics.volume:.9g}",
            opt(metrics.sdas_um)]


def write_metrics_csv(rows: list[list], path: str | Path) -> Path:
    """Write prepared metric rows under the standard header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_COLUMNS)
        writer.writerows(rows)
    return path
