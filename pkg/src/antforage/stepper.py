"""Explicit Euler integration of the full foraging system.

Every right-hand side is evaluated from the state at ``t_n`` and the new
fields are committed together. Nothing is clamped: a step that drives a
density negative raises :class:`NegativeDensityError`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from antforage.fluxes import (
    diffusive_fluxes_u,
    diffusive_fluxes_w,
    drift_velocity_u,
    drift_velocity_w,
    max_outflow_speed,
    upwind_fluxes,
)
from antforage.grid import divergence, total_mass
from antforage.model import ModelParams, SimState, StepLimits, inflow_rate
from antforage.reactions import conversion, deplete_food, nest_exchange, pheromone_rhs

SAFETY = 0.9
NEGATIVE_TOL = 1e-14


class SimulationError(RuntimeError):
    """A step produced an inadmissible state."""

    code = "simulation_error"

    def __init__(self, message: str, field: str | None = None, cell=None):
        super().__init__(message)
        self.field = field
        self.cell = cell
        self.step: int | None = None

    def __str__(self):
        msg = super().__str__()
        return msg if self.step is None else f"step {self.step}: {msg}"


class NegativeDensityError(SimulationError):
    code = "negative_density"


class NonFiniteError(SimulationError):
    code = "nonfinite"


def cfl_limits(state: SimState, params: ModelParams) -> StepLimits:
    """Step-size bounds of the explicit scheme.

    The advective bound uses the largest summed outgoing face speed of any
    cell, and ``dt_max`` combines the three bounds harmonically; together
    these make every cell's total outflow fraction at most ``SAFETY`` per step.
    """
    h = state.grid.h
    dt_diffusion = h * h / (4.0 * max(params.alpha1, params.alpha3, 1.0))
    speed = max(
        max_outflow_speed(drift_velocity_u(state.v, state.z, state.grid, params)),
        max_outflow_speed(drift_velocity_w(state, params)),
    )
    dt_advection = h / speed if speed > 0 else math.inf
    dt_reaction = 1.0 / max(float(np.max(state.c)), params.alpha5, 1.0)
    rate = 1.0 / dt_diffusion + 1.0 / dt_advection + 1.0 / dt_reaction
    return StepLimits(dt_diffusion, dt_advection, dt_reaction, SAFETY / rate)


def _check(name: str, f: np.ndarray):
    lo, hi = f.min(), f.max()
    if lo >= -NEGATIVE_TOL and hi < math.inf:
        return
    if not np.all(np.isfinite(f)):
        j, i = np.argwhere(~np.isfinite(f))[0]
        raise NonFiniteError(f"nonfinite value in {name} at cell (i={i}, j={j})", name, (int(i), int(j)))
    k = int(np.argmin(f))
    if f.flat[k] < -NEGATIVE_TOL:
        j, i = divmod(k, f.shape[1])
        raise NegativeDensityError(
            f"negative density in {name} at cell (i={i}, j={j}): {float(f.flat[k])!r}", name, (i, j)
        )


def _static_w_velocity(state: SimState, params: ModelParams):
    # depends only on the immutable fields, so it is computed once per state lineage
    key = params.alpha2
    cached = state.cache.get("vel_w")
    if cached is None or cached[0] != key:
        cached = (key, drift_velocity_w(state, params))
        state.cache["vel_w"] = cached
    return cached[1]


def step_reference(state: SimState, params: ModelParams, dt: float) -> SimState:
    """One Euler step assembled from the flux and reaction modules (numpy)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    g = state.grid
    u, w, v, c = state.u, state.w, state.v, state.c

    vel_u = drift_velocity_u(v, state.z, g, params)
    flux_u = upwind_fluxes(u, vel_u, params) + -diffusive_fluxes_u(u, v, g, params)
    vel_w = _static_w_velocity(state, params)
    flux_w = upwind_fluxes(w, vel_w, params) + -diffusive_fluxes_w(w, g, params)
    conv = conversion(u, c)
    du_nest, dw_nest = nest_exchange(u, w, state, params, state.t)

    u_new = u + dt * (-divergence(flux_u, g) - conv + du_nest)
    w_new = w + dt * (-divergence(flux_w, g) + conv + dw_nest)
    v_new = v + dt * pheromone_rhs(v, w, g)
    c_new = deplete_food(c, u, params, dt)
    return _commit(state, params, dt, u_new, w_new, v_new, c_new, dw_nest)


def step(state: SimState, params: ModelParams, dt: float) -> SimState:
    """Advance ``state`` by one explicit Euler step of size ``dt``.

    Uses the compiled fused kernel; :func:`step_reference` is the same
    scheme built from the public operators.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    from antforage._kernels import euler_step

    g = state.grid
    vel_w = _static_w_velocity(state, params)
    ev = np.exp(-params.gamma * 0.5 * state.v) if params.gamma != 0.0 else state.v
    u_new, w_new, v_new, dw = (np.empty(g.shape) for _ in range(4))
    euler_step(
        state.u, state.w, state.v, state.c, state.z, ev, state.nest_mask, state.nest_weight,
        vel_w.x_faces, vel_w.y_faces, g.h, g.h**2, dt,
        params.alpha1, params.alpha2, params.alpha3, params.alpha5,
        params.gamma, params.u_max, inflow_rate(state.t, params),
        u_new, w_new, v_new, dw,
    )
    c_new = deplete_food(state.c, state.u, params, dt)
    return _commit(state, params, dt, u_new, w_new, v_new, c_new, dw)


def _commit(state, params, dt, u_new, w_new, v_new, c_new, dw_nest) -> SimState:
    for name, f in (("u", u_new), ("w", w_new), ("v", v_new), ("c", c_new)):
        _check(name, f)
    return replace(
        state,
        t=state.t + dt,
        u=u_new,
        w=w_new,
        v=v_new,
        c=c_new,
        inflow_total=state.inflow_total + dt * inflow_rate(state.t, params),
        unloaded_total=state.unloaded_total - dt * total_mass(dw_nest, state.grid),
        step_index=state.step_index + 1,
    )


@dataclass
class RunReport:
    steps_requested: int
    steps_done: int = 0
    termination: str = "completed"
    error: str | None = None
    error_code: str | None = None
    error_step: int | None = None
    wall_time: float = 0.0
    final_time: float = 0.0
    final_summary: dict = field(default_factory=dict)
    series: list = field(default_factory=list)
    events: object = None
    final_state: SimState | None = field(default=None, repr=False)


def run(scenario, observers=(), early_stop: bool | None = None) -> RunReport:
    """Integrate ``scenario`` for its configured number of steps.

    ``observers`` are callables with an ``every`` attribute; each is called
    with the committed state at step 0 and every ``every`` steps after. A
    time-series recorder at the scenario cadence is always attached and feeds
    the event log of the report.
    """
    from antforage.diagnostics import TimeSeriesRecorder, all_trails_faded, detect_events
    from antforage.scenario import build_initial_state

    cfg = scenario.run
    if early_stop is None:
        early_stop = cfg.early_stop
    recorder = TimeSeriesRecorder(scenario, every=cfg.timeseries_every)
    observers = [recorder, *observers]
    report = RunReport(steps_requested=cfg.steps)

    start = time.perf_counter()
    state = build_initial_state(scenario)

    def notify(s: SimState):
        for obs in observers:
            if s.step_index % obs.every == 0:
                obs(s)

    notify(state)
    for n in range(cfg.steps):
        try:
            state = step(state, scenario.params, cfg.dt)
        except SimulationError as exc:
            exc.step = n + 1
            report.termination = "error"
            report.error = str(exc)
            report.error_code = exc.code
            report.error_step = n + 1
            break
        notify(state)
        if early_stop and state.step_index % recorder.every == 0 and all_trails_faded(recorder.rows, scenario):
            report.termination = "early_stop"
            break

    report.steps_done = state.step_index
    report.final_time = state.t
    report.final_state = state
    report.series = recorder.rows
    ev = scenario.events
    report.events = detect_events(recorder.rows, ev.theta_form, ev.theta_fade, ev.depletion_fraction)
    report.final_summary = {
        "t": state.t,
        "mass_u": total_mass(state.u, state.grid),
        "mass_w": total_mass(state.w, state.grid),
        "mass_v": total_mass(state.v, state.grid),
        "mass_c": total_mass(state.c, state.grid),
        "inflow_total": state.inflow_total,
        "unloaded_total": state.unloaded_total,
    }
    report.wall_time = time.perf_counter() - start
    return report
