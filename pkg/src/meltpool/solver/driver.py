"""Time integration for one process case.

The outer loop advances in fixed steps of the configured dt (the probe
cadence); each outer step is split into substeps bounded by the advective
Courant condition. Within a substep the order is: tentative velocities and
projection using the previous temperature, then the energy/phase update
using the freshly projected face velocities, so scalar advection sees a
divergence-free field and the enthalpy balance telescopes exactly.

Incompressibility is checked inline every substep: the post-projection
divergence, scaled by cell size over the fastest face speed, must stay
below the configured bound or the run aborts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..alloys import AlloyProperties, ProcessCase
from ..config import SolverConfig
from ..dimensionless import DimensionlessSet, compute_numbers
from ..errors import SolverError
from .energy import energy_step
from .grid import Grid
from .laser import LaserBeam, cell_deposit
from .momentum import momentum_step
from .phase import liquid_fraction
from .projection import project
from .state import ProbeSeries, SimState


@dataclass
class RunResult:
    case: ProcessCase
    numbers: DimensionlessSet
    grid: Grid
    state: SimState
    probes: ProbeSeries
    diagnostics: dict = field(default_factory=dict)


def _check_finite(state: SimState, case_id: str, step: int) -> None:
    if not (np.isfinite(state.T).all() and np.isfinite(state.u).all()
            and np.isfinite(state.v).all() and np.isfinite(state.w).all()):
        raise SolverError("non-finite field values", case_id=case_id, step=step)


def run_case(alloy: AlloyProperties, case: ProcessCase, cfg: SolverConfig,
             on_step=None) -> RunResult:
    """Integrate one case to t_end and return fields, probes, diagnostics.

    ``on_step(result, step)`` runs after each outer step (snapshot hook).
    """
    numbers = compute_numbers(alloy, case)
    grid = Grid.from_case(case, cfg.spacing, cfg.spacing_z)
    T0 = cfg.initial_T_tilde
    if T0 is None:
        T0 = numbers.T_tilde_preheat
    phi0 = liquid_fraction(np.full(grid.shape, T0), numbers, case.mushy_lambda)
    state = SimState.initial(grid, T0, phi0)
    beam = None
    if cfg.laser_enabled:
        beam = LaserBeam.from_numbers(numbers, a_abs=case.a_abs, f=case.f,
                                      x_start=cfg.x_start)

    h_min = min(grid.dx, grid.dy, grid.dz)
    n_outer = max(1, round(cfg.t_end / cfg.dt))
    bottom_T = None if cfg.insulated else numbers.T_tilde_preheat

    deposited = 0.0
    div_rel_max = 0.0
    div_abs_max = 0.0
    latent_iter_max = 0
    substeps_total = 0
    Tmax_seen = float(state.T.max())
    vmax_seen = 0.0
    started = time.perf_counter()

    probes = ProbeSeries()
    probes.record(0, 0.0, float(state.T.max()), 0.0, 0, 0.0, 0.0)
    result = RunResult(case=case, numbers=numbers, grid=grid, state=state,
                       probes=probes)

    t = 0.0
    for step in range(1, n_outer + 1):
        remaining = cfg.dt
        step_div = 0.0
        substeps = 0
        while remaining > 1e-12 * cfg.dt:
            vmax_face = state.max_face_speed()
            dt_sub = remaining
            if vmax_face > 0.0:
                dt_sub = min(dt_sub, cfg.cfl * h_min / vmax_face)
            substeps += 1
            if substeps > cfg.max_substeps:
                raise SolverError(
                    f"more than {cfg.max_substeps} substeps in one step "
                    f"(face speed {vmax_face:.3g})",
                    case_id=case.id, step=step)

            if cfg.solve_flow and float(state.phi.max()) >= cfg.phi_solid_cut:
                coeffs = momentum_step(
                    state, state.phi, state.T, numbers=numbers, grid=grid,
                    dt=dt_sub, porosity_floor=case.porosity_floor,
                    phi_solid_cut=cfg.phi_solid_cut,
                    shear_override=cfg.shear_override)
                div_abs, _ = project(
                    state, coeffs, grid, phi=state.phi,
                    phi_solid_cut=cfg.phi_solid_cut,
                    poisson_tol=cfg.poisson_tol)
                # normalized by the flow scale, floored at the scan speed
                # (exactly 1 in these units) so a fully damped blob does not
                # divide round-off by round-off
                speed_now = state.max_face_speed()
                div_rel = div_abs * h_min / max(speed_now, 1.0)
                if div_rel > cfg.div_tol:
                    raise SolverError(
                        f"relative divergence {div_rel:.3g} above "
                        f"{cfg.div_tol:g}", case_id=case.id, step=step)
                step_div = max(step_div, div_rel)
                div_abs_max = max(div_abs_max, div_abs)

            source = None
            if beam is not None:
                source = cell_deposit(beam, grid, t + 0.5 * dt_sub)
                deposited += dt_sub * float(source.sum()) * grid.cell_volume
            T_new, phi_used, iters = energy_step(
                state.T, state.phi, state.u, state.v, state.w,
                numbers=numbers, grid=grid, dt=dt_sub, source=source,
                mushy_lambda=case.mushy_lambda, insulated=cfg.insulated,
                bottom_T=bottom_T, top_flux=cfg.top_heat_flux,
                latent_tol=cfg.latent_tol, latent_max_iter=cfg.latent_max_iter,
                latent_strict=cfg.latent_strict)
            state.T = T_new
            state.phi = phi_used
            latent_iter_max = max(latent_iter_max, iters)

            t += dt_sub
            remaining -= dt_sub
            Tmax_seen = max(Tmax_seen, float(state.T.max()))
            vmax_seen = max(vmax_seen, float(state.speed().max()))
        _check_finite(state, case.id, step)

        substeps_total += substeps
        div_rel_max = max(div_rel_max, step_div)
        state.t_tilde = t
        state.step = step
        melt_cells = int((state.phi >= cfg.phi_melt_threshold).sum())
        probes.record(step, t, float(state.T.max()),
                      float(state.speed().max()), melt_cells, step_div,
                      state.max_face_speed())
        if on_step is not None:
            on_step(result, step)

    result.diagnostics = {
        "energy_deposited": deposited,
        "div_rel_max": div_rel_max,
        "div_abs_max": div_abs_max,
        "latent_iter_max": latent_iter_max,
        "substeps_total": substeps_total,
        "Tmax_tilde_alltime": Tmax_seen,
        "vmax_tilde_alltime": vmax_seen,
        "wall_time_s": time.perf_counter() - started,
    }
    return result
