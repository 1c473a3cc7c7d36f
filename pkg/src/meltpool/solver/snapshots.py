"""Field snapshot files, probe history, and plot-ready slice exports.

Snapshot format (version 1): one flat little-endian float64 binary per
field, C-ordered with axes (x, y, z), plus a JSON sidecar named
``<prefix>.json`` describing shape, spacings, origin, dtype, reduced time,
and the field-name to file-name map. Velocities are exported averaged to
cell centers so every field shares one shape. ``read_snapshot`` round-trips
anything ``write_snapshot`` produced.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SNAPSHOT_FORMAT = "meltpool-snapshot"
SNAPSHOT_VERSION = 1

PROBE_COLUMNS = ("step", "t_tilde", "Tmax_tilde", "vmax_tilde", "melt_cells")


def write_snapshot(result, out_dir: str | Path, prefix: str = "snapshot") -> Path:
    """Dump cell-centered fields of a run; returns the descriptor path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = result.state
    uc, vc, wc = state.cell_velocity()
    fields = {
        "T_tilde": state.T,
        "phi": state.phi,
        "p_tilde": state.p,
        "u_tilde": uc,
        "v_tilde": vc,
        "w_tilde": wc,
    }
    file_map = {}
    for name, data in fields.items():
        fname = f"{prefix}_{name}.bin"
        np.ascontiguousarray(data, dtype="<f8").tofile(out / fname)
        file_map[name] = fname
    grid = result.grid
    descriptor = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "case_id": result.case.id,
        "t_tilde": state.t_tilde,
        "step": state.step,
        "shape": list(grid.shape),
        "spacing": [grid.dx, grid.dy, grid.dz],
        "origin": list(grid.origin),
        "dtype": "<f8",
        "order": "C",
        "axes": ["x_tilde", "y_tilde", "z_tilde"],
        "fields": file_map,
    }
    path = out / f"{prefix}.json"
    path.write_text(json.dumps(descriptor, indent=2) + "\n")
    return path


def read_snapshot(descriptor_path: str | Path):
    """Load a snapshot back as (descriptor dict, {field: array})."""
    path = Path(descriptor_path)
    descriptor = json.loads(path.read_text())
    if descriptor.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"{path}: not a snapshot descriptor")
    if descriptor.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version "
                         f"{descriptor.get('version')!r}")
    shape = tuple(descriptor["shape"])
    fields = {}
    for name, fname in descriptor["fields"].items():
        data = np.fromfile(path.parent / fname, dtype=descriptor["dtype"])
        fields[name] = data.reshape(shape)
    return descriptor, fields


def write_probes(probes, path: str | Path) -> Path:
    """Per-step scalar history as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = probes.arrays()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROBE_COLUMNS)
        for i in range(len(arrays["step"])):
            writer.writerow([arrays["step"][i],
                             f"{arrays['t_tilde'][i]:.9g}",
                             f"{arrays['Tmax_tilde'][i]:.9g}",
                             f"{arrays['vmax_tilde'][i]:.9g}",
                             arrays["melt_cells"][i]])
    return path


def write_slices(result, out_dir: str | Path, prefix: str = "slice") -> list[Path]:
    """Top-surface plane and scan-axis centerline as plot-ready CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = result.grid
    state = result.state
    speed = state.speed()
    j_mid = int(np.argmin(np.abs(grid.y_centers)))

    plane_path = out / f"{prefix}_plane_z0.csv"
    with open(plane_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_tilde", "y_tilde", "T_tilde", "phi", "speed_tilde"])
        for i, x in enumerate(grid.x_centers):
            for j, y in enumerate(grid.y_centers):
                writer.writerow([f"{x:.9g}", f"{y:.9g}",
                                 f"{state.T[i, j, 0]:.9g}",
                                 f"{state.phi[i, j, 0]:.9g}",
                                 f"{speed[i, j, 0]:.9g}"])

    line_path = out / f"{prefix}_centerline.csv"
    with open(line_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_tilde", "T_tilde", "phi", "speed_tilde"])
        for i, x in enumerate(grid.x_centers):
            writer.writerow([f"{x:.9g}",
                             f"{state.T[i, j_mid, 0]:.9g}",
                             f"{state.phi[i, j_mid, 0]:.9g}",
                             f"{speed[i, j_mid, 0]:.9g}"])
    return [plane_path, line_path]
