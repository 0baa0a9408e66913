"""Experiment description: config parsing, validation and the initial state."""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from antforage.grid import Grid, make_grid
from antforage.model import ModelParams, SimState, Topography, nest_field, topography

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


class InitialStateError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    h: float

    def build(self) -> Grid:
        return make_grid(self.nx, self.ny, self.h)


@dataclass(frozen=True)
class NestSpec:
    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class FoodSource:
    center: tuple[float, float]
    radius: float
    amount: float


@dataclass(frozen=True)
class RunSpec:
    dt: float
    steps: int = 1000
    snapshot_every: int = 1000
    timeseries_every: int = 100
    out_dir: str = "out"
    early_stop: bool = False


@dataclass(frozen=True)
class EventSpec:
    theta_form: float = 0.1
    theta_fade: float = 0.02
    depletion_fraction: float = 0.01
    trail_samples: int = 64


@dataclass(frozen=True)
class SnapshotSpec:
    pgm: tuple[str, ...] = ("w", "v")
    # per-field (lo, hi) for PGM scaling; fields left out are scaled from their first snapshot
    ranges: tuple[tuple[str, tuple[float, float]], ...] = ()

    def range_for(self, name: str):
        return dict(self.ranges).get(name)


@dataclass(frozen=True)
class Scenario:
    grid: GridSpec
    params: ModelParams
    nest: NestSpec
    food: tuple[FoodSource, ...]
    run: RunSpec
    topography: Topography = Topography()
    initial_u: float | None = None  # None: no ants at t=0
    events: EventSpec = EventSpec()
    snapshots: SnapshotSpec = SnapshotSpec()
    name: str = "scenario"

    def with_run(self, **changes) -> Scenario:
        return replace(self, run=replace(self.run, **changes))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


# ---------------------------------------------------------------- parsing

_FIELD_KINDS = {"u", "w", "v", "c"}

_SCHEMA = {
    "scenario": {"name": str},
    "grid": {"nx": int, "ny": int, "h": float},
    "params": {
        "alpha1": float, "alpha2": float, "alpha3": float, "alpha4": float, "alpha5": float,
        "gamma": float, "u_max": "inf_float", "m0": float, "t_inflow": "inf_float", "eps_nest": float,
    },
    "nest": {"center": "point", "radius": float},
    "food": {"center": "point", "radius": float, "amount": float},
    "topography": {"preset": str, "center": "point", "amplitude": float, "sigma": float},
    "run": {
        "dt": float, "steps": int, "snapshot_every": int, "timeseries_every": int,
        "out_dir": str, "early_stop": bool,
    },
    "initial": {"u": "initial"},
    "events": {"theta_form": float, "theta_fade": float, "depletion_fraction": float, "trail_samples": int},
    "snapshots": {"pgm": "field_list", **{f"{k}_range": "point" for k in sorted(_FIELD_KINDS)}},
}

_REQUIRED = {"grid": ("nx", "ny", "h"), "food": ("center", "radius", "amount")}


def _coerce(section: str, key: str, value, kind):
    where = f"{section}.{key}"

    def bad(expected):
        return ConfigError(f"type mismatch for '{where}': expected {expected}, got {value!r}")

    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise bad("an integer")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise bad("a number")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise bad("a string")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise bad("true or false")
        return value
    if kind == "inf_float":
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "unbounded"):
            return math.inf
        return _coerce(section, key, value, float)
    if kind == "point":
        if not (isinstance(value, list) and len(value) == 2):
            raise bad("a two-element array [x, y]")
        return tuple(_coerce(section, key, x, float) for x in value)
    if kind == "initial":
        if isinstance(value, str):
            if value == "empty":
                return None
            raise bad('"empty" or a number')
        return _coerce(section, key, value, float)
    if kind == "field_list":
        if not isinstance(value, list) or not all(isinstance(x, str) and x in _FIELD_KINDS for x in value):
            raise bad(f"an array of field names from {sorted(_FIELD_KINDS)}")
        return tuple(value)
    raise AssertionError(kind)


def _section(doc: dict, name: str, required: bool = False, array: bool = False):
    raw = doc.get(name)
    if raw is None:
        if required:
            raise ConfigError(f"missing required section [{'[' if array else ''}{name}{']' if array else ''}]")
        return [] if array else {}
    tables = raw if array else [raw]
    if array and not isinstance(raw, list):
        raise ConfigError(f"'{name}' must be an array of tables ([[{name}]])")
    if not array and not isinstance(raw, dict):
        raise ConfigError(f"'{name}' must be a table ([{name}])")
    out = []
    schema = _SCHEMA[name]
    for table in tables:
        parsed = {}
        for key, value in table.items():
            if key not in schema:
                raise ConfigError(f"unknown key '{name}.{key}'")
            parsed[key] = _coerce(name, key, value, schema[key])
        for key in _REQUIRED.get(name, ()):
            if key not in parsed:
                raise ConfigError(f"missing required key '{name}.{key}'")
        out.append(parsed)
    return out if array else out[0]


def parse_config(text: str) -> Scenario:
    """Parse a scenario from TOML text.

    Omitted optional keys take defaults: model coefficients from
    :class:`ModelParams`, the nest at the domain center with radius ``1.5 h``,
    ``dt`` at half the diffusive limit, flat terrain, no initial ants.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from None

    for key in doc:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key '{key}'")

    meta = _section(doc, "scenario")
    g = _section(doc, "grid", required=True)
    if not isinstance(doc.get("food", []), list):
        raise ConfigError("food sources must be given as [[food]] tables")
    foods = _section(doc, "food", required=True, array=True)
    p = _section(doc, "params")
    nest = _section(doc, "nest")
    topo = _section(doc, "topography")
    run = _section(doc, "run")
    initial = _section(doc, "initial")
    events = _section(doc, "events")
    snaps = _section(doc, "snapshots")

    try:
        grid = GridSpec(g["nx"], g["ny"], g["h"])
        params = ModelParams(**p)
        topography_ = Topography(kind=topo.pop("preset", "flat"), **topo)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    lx, ly = grid.nx * grid.h, grid.ny * grid.h
    nest_spec = NestSpec(nest.get("center", (lx / 2, ly / 2)), nest.get("radius", 1.5 * grid.h))
    food = tuple(FoodSource(f["center"], f["radius"], f["amount"]) for f in foods)

    if "dt" not in run:
        run["dt"] = 0.5 * grid.h**2 / (4.0 * max(params.alpha1, params.alpha3, 1.0))
    run_spec = RunSpec(**run)

    ranges = tuple(
        (k[: -len("_range")], v) for k, v in sorted(snaps.items()) if k.endswith("_range")
    )
    snapshot_spec = SnapshotSpec(pgm=snaps.get("pgm", SnapshotSpec.pgm), ranges=ranges)

    return Scenario(
        grid=grid,
        params=params,
        nest=nest_spec,
        food=food,
        run=run_spec,
        topography=topography_,
        initial_u=initial.get("u"),
        events=EventSpec(**events),
        snapshots=snapshot_spec,
        name=meta.get("name", "scenario"),
    )


def load_config(path) -> Scenario:
    return parse_config(Path(path).read_text())


def bundled_config_text(name: str = "two_sources") -> str:
    return resources.files("antforage").joinpath("scenarios", f"{name}.toml").read_text()


def load_bundled(name: str = "two_sources") -> Scenario:
    return parse_config(bundled_config_text(name))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return '"inf"' if math.isinf(x) and x > 0 else repr(x)
    if isinstance(x, str):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(x, (tuple, list)):
        return "[" + ", ".join(_fmt(e) for e in x) + "]"
    raise TypeError(type(x))


def to_toml(s: Scenario) -> str:
    """Serialize a scenario; :func:`parse_config` reads it back unchanged."""
    lines = ["[scenario]", f"name = {_fmt(s.name)}", "", "[grid]"]
    lines += [f"{k} = {_fmt(v)}" for k, v in asdict(s.grid).items()]
    lines += ["", "[params]"]
    lines += [f"{f.name} = {_fmt(getattr(s.params, f.name))}" for f in fields(s.params)]
    lines += ["", "[nest]", f"center = {_fmt(s.nest.center)}", f"radius = {_fmt(s.nest.radius)}"]
    for src in s.food:
        lines += ["", "[[food]]", f"center = {_fmt(src.center)}", f"radius = {_fmt(src.radius)}",
                  f"amount = {_fmt(src.amount)}"]
    t = s.topography
    lines += ["", "[topography]", f"preset = {_fmt(t.kind)}", f"center = {_fmt(t.center)}",
              f"amplitude = {_fmt(t.amplitude)}", f"sigma = {_fmt(t.sigma)}"]
    lines += ["", "[run]"] + [f"{k} = {_fmt(v)}" for k, v in asdict(s.run).items()]
    lines += ["", "[initial]", f"u = {_fmt('empty' if s.initial_u is None else s.initial_u)}"]
    lines += ["", "[events]"] + [f"{k} = {_fmt(v)}" for k, v in asdict(s.events).items()]
    lines += ["", "[snapshots]", f"pgm = {_fmt(s.snapshots.pgm)}"]
    lines += [f"{k}_range = {_fmt(v)}" for k, v in s.snapshots.ranges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- validation

def _disk_inside(center, radius, lx, ly) -> bool:
    x, y = center
    return radius <= x <= lx - radius and radius <= y <= ly - radius


def validate(s: Scenario) -> list[Violation]:
    """All invariant violations of ``s``; an empty list means it can run."""
    from antforage.stepper import cfl_limits

    out: list[Violation] = []
    try:
        s.grid.build()
    except ValueError as exc:
        return [Violation("grid.invalid", str(exc))]
    lx, ly = s.grid.nx * s.grid.h, s.grid.ny * s.grid.h

    if not s.nest.radius > 0:
        out.append(Violation("nest.radius", f"nest radius must be > 0, got {s.nest.radius}"))
    elif not _disk_inside(s.nest.center, s.nest.radius, lx, ly):
        out.append(Violation("nest.out_of_domain",
                             f"nest disk at {s.nest.center} r={s.nest.radius} leaves [0,{lx}]x[0,{ly}]"))
    if not s.food:
        out.append(Violation("food.missing", "at least one food source is required"))
    for k, src in enumerate(s.food):
        if not src.radius > 0:
            out.append(Violation("food.radius", f"food[{k}] radius must be > 0, got {src.radius}"))
        elif not _disk_inside(src.center, src.radius, lx, ly):
            out.append(Violation("food.out_of_domain",
                                 f"food[{k}] disk at {src.center} r={src.radius} leaves [0,{lx}]x[0,{ly}]"))
        if not src.amount > 0:
            out.append(Violation("food.amount", f"food[{k}] amount must be > 0, got {src.amount}"))
    if s.initial_u is not None and not (s.initial_u >= 0 and math.isfinite(s.initial_u)):
        out.append(Violation("initial.u", f"initial u must be a finite number >= 0, got {s.initial_u}"))

    r = s.run
    if not (r.dt > 0 and math.isfinite(r.dt)):
        out.append(Violation("run.dt", f"dt must be positive, got {r.dt}"))
    if r.steps < 0:
        out.append(Violation("run.steps", f"steps must be >= 0, got {r.steps}"))
    for key in ("snapshot_every", "timeseries_every"):
        if getattr(r, key) < 1:
            out.append(Violation(f"run.{key}", f"{key} must be >= 1, got {getattr(r, key)}"))

    e = s.events
    if not (0 < e.depletion_fraction < 1):
        out.append(Violation("events.depletion_fraction",
                             f"depletion_fraction must lie in (0, 1), got {e.depletion_fraction}"))
    if not e.theta_fade <= e.theta_form:
        out.append(Violation("events.thresholds",
                             f"theta_fade ({e.theta_fade}) must not exceed theta_form ({e.theta_form})"))
    if e.trail_samples < 2:
        out.append(Violation("events.trail_samples", f"trail_samples must be >= 2, got {e.trail_samples}"))
    for name, (lo, hi) in s.snapshots.ranges:
        if name not in _FIELD_KINDS or not hi > lo:
            out.append(Violation("snapshots.range", f"bad PGM range for {name}: [{lo}, {hi}]"))

    if out:
        return out
    try:
        state = build_initial_state(s)
    except InitialStateError as exc:
        return [Violation(exc.args[1], exc.args[0])]
    limits = cfl_limits(state, s.params)
    if r.dt > limits.dt_max:
        out.append(Violation("run.dt_unstable",
                             f"dt = {r.dt!r} exceeds the stable limit dt_max = {limits.dt_max!r}"))
    return out


# ---------------------------------------------------------------- initial state

def disk_mask(grid: Grid, center, radius: float) -> np.ndarray:
    X, Y = grid.cell_centers()
    return (X - center[0]) ** 2 + (Y - center[1]) ** 2 <= radius**2


def build_initial_state(s: Scenario) -> SimState:
    grid = s.grid.build()
    nest_mask = disk_mask(grid, s.nest.center, s.nest.radius).astype(float)
    n_nest = int(nest_mask.sum())
    if n_nest == 0:
        raise InitialStateError(
            f"nest resolves to zero cells (radius {s.nest.radius} at {s.nest.center}, h={grid.h})", "nest.empty"
        )
    nest_weight = nest_mask / (n_nest * grid.cell_area)

    c = grid.zeros()
    for k, src in enumerate(s.food):
        mask = disk_mask(grid, src.center, src.radius)
        n = int(mask.sum())
        if n == 0:
            raise InitialStateError(f"food[{k}] resolves to zero cells (radius {src.radius}, h={grid.h})",
                                    "food.empty")
        c += mask * (src.amount / (n * grid.cell_area))

    X, Y = grid.cell_centers()
    vx, vy = nest_field((X, Y), s.nest.center, s.params.eps_nest)
    u = grid.zeros() if s.initial_u is None else grid.full(s.initial_u)
    return SimState(
        grid=grid,
        t=0.0,
        u=u,
        w=grid.zeros(),
        v=grid.zeros(),
        c=c,
        z=np.asarray(topography(s.topography, (X, Y)), dtype=float),
        nest_mask=nest_mask,
        nest_weight=nest_weight,
        vfield_x=vx,
        vfield_y=vy,
        nest_center=tuple(s.nest.center),
    )
