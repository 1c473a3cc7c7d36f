"""Finite-volume meltpool solver: staggered grid, projection flow,
semi-implicit energy with phase change, moving-beam deposition."""

from .driver import RunResult, run_case
from .energy import energy_step, upwind_flux_divergence
from .grid import Grid
from .laser import LaserBeam, cell_deposit, laser_source
from .momentum import FaceCoefficients, face_fractions, momentum_step
from .phase import kozeny_carman, liquid_fraction
from .projection import project
from .snapshots import (read_snapshot, write_probes, write_slices,
                        write_snapshot)
from .spectral import solve_helmholtz, thomas
from .state import ProbeSeries, SimState

__all__ = [
    "FaceCoefficients",
    "Grid",
    "LaserBeam",
    "ProbeSeries",
    "RunResult",
    "SimState",
    "cell_deposit",
    "energy_step",
    "face_fractions",
    "kozeny_carman",
    "laser_source",
    "liquid_fraction",
    "momentum_step",
    "project",
    "read_snapshot",
    "run_case",
    "solve_helmholtz",
    "thomas",
    "upwind_flux_divergence",
    "write_probes",
    "write_slices",
    "write_snapshot",
]
