"""Conservation ledgers, trail metrics and event detection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from antforage.grid import Grid, interp_bilinear, total_mass
from antforage.model import SimState

NEVER = None


@dataclass
class TimeSeriesRow:
    step: int
    t: float
    mass_u: float
    mass_w: float
    mass_v: float
    mass_c: float
    food: list[float]
    trail: list[float]
    unloaded: float
    inflow: float = 0.0

    def header(self) -> list[str]:
        return (
            ["step", "t", "mass_u", "mass_w", "mass_v", "mass_c"]
            + [f"food_{k}" for k in range(len(self.food))]
            + [f"trail_{k}" for k in range(len(self.trail))]
            + ["unloaded", "inflow"]
        )

    def values(self) -> list:
        return [self.step, self.t, self.mass_u, self.mass_w, self.mass_v, self.mass_c,
                *self.food, *self.trail, self.unloaded, self.inflow]


@dataclass
class SourceEvents:
    formation_time: float | None = NEVER
    depletion_time: float | None = NEVER
    fade_time: float | None = NEVER

    def as_dict(self) -> dict:
        return {k: ("never" if v is None else v) for k, v in vars(self).items()}


@dataclass
class EventLog:
    sources: list[SourceEvents] = field(default_factory=list)

    def as_dict(self) -> list[dict]:
        return [s.as_dict() for s in self.sources]


def trail_strength(v: np.ndarray, grid: Grid, nest_center, food_center, k: int = 64,
                   nest_radius: float = 0.0, food_radius: float = 0.0) -> float:
    """Weakest pheromone level along the straight corridor from nest to food.

    ``k`` equally spaced points on the open segment between the nest disk
    boundary and the food disk boundary are sampled bilinearly; the minimum
    is returned, so a single gap anywhere breaks the trail.
    """
    if k < 2:
        raise ValueError(f"need at least 2 samples, got {k}")
    a = np.asarray(nest_center, dtype=float)
    b = np.asarray(food_center, dtype=float)
    d = b - a
    length = float(np.hypot(*d))
    if length > 0:
        e = d / length
        a, b = a + nest_radius * e, b - food_radius * e
    s = np.arange(1, k + 1) / (k + 1)
    return min(interp_bilinear(v, grid, a + si * (b - a)) for si in s)


def source_masks(state: SimState, scenario) -> list[np.ndarray]:
    from antforage.scenario import disk_mask

    return [disk_mask(state.grid, src.center, src.radius) for src in scenario.food]


def record(state: SimState, scenario, masks=None) -> TimeSeriesRow:
    g = state.grid
    masks = source_masks(state, scenario) if masks is None else masks
    k = scenario.events.trail_samples
    return TimeSeriesRow(
        step=state.step_index,
        t=state.t,
        mass_u=total_mass(state.u, g),
        mass_w=total_mass(state.w, g),
        mass_v=total_mass(state.v, g),
        mass_c=total_mass(state.c, g),
        food=[total_mass(np.where(m, state.c, 0.0), g) for m in masks],
        trail=[
            trail_strength(state.v, g, scenario.nest.center, src.center, k, scenario.nest.radius, src.radius)
            for src in scenario.food
        ],
        unloaded=state.unloaded_total,
        inflow=state.inflow_total,
    )


def detect_events(series, theta_form: float, theta_fade: float, depletion_fraction: float) -> EventLog:
    """Trail formation, food depletion and trail fade times per source.

    Fade is the first time at or after both formation and depletion when the
    strength drops to ``theta_fade``; ``theta_fade < theta_form`` gives the
    detector hysteresis. A source that starts empty never counts as depleted.
    """
    if not theta_fade <= theta_form:
        raise ValueError("theta_fade must not exceed theta_form")
    if not 0 < depletion_fraction < 1:
        raise ValueError("depletion_fraction must lie in (0, 1)")
    series = list(series)
    if not series:
        return EventLog()
    log = EventLog()
    for k in range(len(series[0].food)):
        ev = SourceEvents()
        initial = series[0].food[k]
        for row in series:
            if ev.formation_time is None and row.trail[k] >= theta_form:
                ev.formation_time = row.t
            if ev.depletion_time is None and initial > 0 and row.food[k] <= depletion_fraction * initial:
                ev.depletion_time = row.t
            if (ev.fade_time is None and ev.formation_time is not None and ev.depletion_time is not None
                    and row.trail[k] <= theta_fade):
                ev.fade_time = row.t
        log.sources.append(ev)
    return log


def all_trails_faded(series, scenario) -> bool:
    e = scenario.events
    log = detect_events(series, e.theta_form, e.theta_fade, e.depletion_fraction)
    return bool(log.sources) and all(s.fade_time is not None for s in log.sources)


class TimeSeriesRecorder:
    """Run observer collecting one :class:`TimeSeriesRow` every ``every`` steps."""

    def __init__(self, scenario, every: int = 100):
        self.scenario = scenario
        self.every = every
        self.rows: list[TimeSeriesRow] = []
        self._masks = None

    def __call__(self, state: SimState):
        if self._masks is None:
            self._masks = source_masks(state, self.scenario)
        self.rows.append(record(state, self.scenario, self._masks))


def _num(x) -> str:
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def write_timeseries_csv(rows, path) -> None:
    """Header plus one line per row, floats in shortest round-trip form."""
    rows = list(rows)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        if rows:
            out.writerow(rows[0].header())
        for row in rows:
            out.writerow([_num(x) for x in row.values()])


def read_timeseries_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(fh)]


def ledger_drift(series) -> float:
    """Largest relative departure of ``mass_u + mass_w - inflow`` from its first value."""
    base = series[0].mass_u + series[0].mass_w - series[0].inflow
    scale = max(abs(base), max(r.mass_u + r.mass_w for r in series), math.ulp(1.0))
    return max(abs(r.mass_u + r.mass_w - r.inflow - base) for r in series) / scale
