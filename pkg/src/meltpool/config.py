"""Run configuration: solver knobs, config-file parsing, config hashing.

Settings come from three layers, later wins: built-in defaults, a plain-text
key-value file (``--config`` flag or the ``MELTPOOL_CONFIG`` environment
variable), and direct CLI flags. The file format is one ``key = value`` per
line with ``#`` comments; keys are the SolverConfig field names plus the
harness keys ``jobs`` and ``out_dir``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError

ENV_CONFIG = "MELTPOOL_CONFIG"


@dataclass(frozen=True)
class SolverConfig:
    """Numerical settings for one simulation (lengths/times in track units)."""

    spacing: float = 1.0          # lateral cell size (cubic when spacing_z unset)
    spacing_z: float | None = None  # vertical cell size; None follows spacing
    dt: float = 1.0               # outer step size
    t_end: float = 100.0
    cfl: float = 0.5              # advective Courant bound for substepping
    max_substeps: int = 400       # per outer step, before giving up
    energy_tol: float = 1e-9      # residual guard for the energy solve
    poisson_tol: float = 1e-9     # residual guard for the pressure solve
    latent_tol: float = 1e-6      # sup-norm phase-change iteration tolerance
    latent_max_iter: int = 50
    latent_strict: bool = False   # raise instead of warn on non-convergence
    phi_melt_threshold: float = 0.5
    phi_solid_cut: float = 1e-3   # below this the material is held rigid
    div_tol: float = 1e-8         # relative post-projection divergence bound
    x_start: float = 10.0         # beam start offset from the inflow wall
    insulated: bool = False       # adiabatic everywhere (verification runs)
    solve_flow: bool = True
    laser_enabled: bool = True
    top_heat_flux: float = 0.0    # uniform influx at z=0 (verification runs)
    shear_override: float | None = None  # fixed du/dz at z=0 replacing Marangoni
    initial_T_tilde: float | None = None  # None -> preheat temperature
    snapshot_every: int = 0       # outer steps between snapshots; 0 = final only
    response_mode: str = "probe"  # "probe" (all-time max) or "snapshot" (t_end)

    def __post_init__(self):
        if self.spacing <= 0 or self.dt <= 0 or self.t_end <= 0:
            raise ValidationError("spacing, dt, and t_end must be positive")
        if self.spacing_z is not None and self.spacing_z <= 0:
            raise ValidationError("spacing_z must be positive when set")
        if not (0 < self.cfl <= 1.0):
            raise ValidationError("cfl must lie in (0, 1]")
        if self.response_mode not in ("probe", "snapshot"):
            raise ValidationError("response_mode must be 'probe' or 'snapshot'")
        if self.max_substeps < 1 or self.latent_max_iter < 1:
            raise ValidationError("iteration limits must be >= 1")

    def coarse(self) -> "SolverConfig":
        """Quick-run variant: doubled lateral spacing, vertical step kept.

        Depth stays at the base resolution because the surface boundary
        layer and the pool depth are the first casualties of coarsening.
        """
        z = self.spacing_z if self.spacing_z is not None else self.spacing
        return dataclasses.replace(self, spacing=2.0 * self.spacing,
                                   spacing_z=z)


_BOOL_STRINGS = {"true": True, "1": True, "yes": True,
                 "false": False, "0": False, "no": False}
HARNESS_KEYS = ("jobs", "out_dir")


def _coerce(name: str, raw: str, target_type) -> object:
    raw = raw.strip()
    if target_type is bool or isinstance(target_type, bool):
        try:
            return _BOOL_STRINGS[raw.lower()]
        except KeyError:
            raise ValidationError(f"config key {name}: bad boolean {raw!r}") from None
    if raw.lower() in ("none", "null", ""):
        return None
    try:
        if target_type is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ValidationError(f"config key {name}: bad value {raw!r}") from None


def parse_config_file(path: str | Path) -> dict:
    """Read key=value lines; returns raw string values keyed by name."""
    entries: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValidationError(f"{path}: line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        entries[key.strip()] = value.split("#", 1)[0].strip()
    return entries


def build_config(file_path: str | Path | None = None,
                 overrides: dict | None = None) -> tuple[SolverConfig, dict]:
    """Layer defaults, optional file, and overrides into a SolverConfig.

    Returns (config, harness) where harness holds the non-solver keys
    (jobs, out_dir) found in the file.
    """
    if file_path is None:
        file_path = os.environ.get(ENV_CONFIG) or None
    fields = {f.name: f for f in dataclasses.fields(SolverConfig)}
    values: dict[str, object] = {}
    harness: dict[str, object] = {}
    if file_path is not None:
        for key, raw in parse_config_file(file_path).items():
            if key in HARNESS_KEYS:
                harness[key] = int(raw) if key == "jobs" else raw
                continue
            if key not in fields:
                raise ValidationError(f"unknown config key {key!r}")
            if key == "response_mode":
                values[key] = raw
                continue
            default = fields[key].default
            target = type(default) if default is not None else float
            values[key] = _coerce(key, raw, target)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return SolverConfig(**values), harness


def config_hash(cfg: SolverConfig) -> str:
    """Stable short hash of everything that affects simulation results."""
    payload = dataclasses.asdict(cfg)
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]
