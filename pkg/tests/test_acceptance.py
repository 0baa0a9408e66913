"""Acceptance suite: one PASS/FAIL line per criterion, collected in the terminal summary.

Run on its own with ``pytest tests/test_acceptance.py -v``; add ``--full-scale``
for the full-resolution two-source experiment.
"""

import json
import math
import time

import numpy as np
import pytest

from antforage import cli
from antforage.diagnostics import read_timeseries_csv
from antforage.grid import make_grid, total_mass
from antforage.model import ModelParams, Topography, topography
from antforage.scenario import bundled_config_text, load_bundled
from antforage.stepper import NegativeDensityError, cfl_limits, run, step

from conftest import ACCEPTANCE_LINES, make_state
from oracles import simplified_model_step

# tolerances
LEDGER_REL = 1e-10
PHEROMONE_REL = 1e-12
CONSERVATION_BUDGET_S = 10.0
EVAPORATION_TOL = 2e-3
CONVERGENCE_RATIO = (1.7, 2.3)
GAUSSIAN_L1 = 0.02
DIFFUSION_BUDGET_S = 5.0
POSITIVITY_CASES = 10_000
DEPLETED_BELOW = 0.01
ORACLE_LINF = 1e-12


def verdict(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_fields(rng, g, scale=1.0):
    return {k: scale * rng.random(g.shape) for k in "uwvc"}


# ---------------------------------------------------------------- 1

def test_conservation_suite(rng):
    g = make_grid(50, 50, 0.02)
    p = ModelParams(alpha1=0.5, alpha2=2.0, alpha3=0.2, alpha4=1.0, alpha5=5.0, gamma=1.0, u_max=4.0,
                    m0=2.0, t_inflow=0.05, eps_nest=0.1)
    X, Y = g.cell_centers()
    z = topography(Topography("gaussian_hill", (0.3, 0.7), 0.2, 0.15), (X, Y))
    s = make_state(g, p, z=z, **random_fields(rng, g))

    start = time.perf_counter()
    base = total_mass(s.u, g) + total_mass(s.w, g)
    ledger_err = pher_err = 0.0
    food_up = negatives = 0
    for _ in range(1000):
        dt = cfl_limits(s, p).dt_max
        mv, mw, mc = total_mass(s.v, g), total_mass(s.w, g), total_mass(s.c, g)
        s = step(s, p, dt)
        mv_new = total_mass(s.v, g)
        pher_err = max(pher_err, abs(mv_new - (mv + dt * (mw - mv))) / abs(mv_new))
        ants = total_mass(s.u, g) + total_mass(s.w, g)
        ledger_err = max(ledger_err, abs(ants - s.inflow_total - base) / ants)
        food_up += total_mass(s.c, g) > mc
        negatives += min(s.u.min(), s.w.min(), s.v.min(), s.c.min()) < 0
    elapsed = time.perf_counter() - start

    ok = (ledger_err <= LEDGER_REL and pher_err <= PHEROMONE_REL and food_up == 0 and negatives == 0
          and elapsed < CONSERVATION_BUDGET_S and s.inflow_total > 0)
    verdict(1, "conservation suite", ok,
            f"ant ledger {ledger_err:.1e}, pheromone ledger {pher_err:.1e}, food increases {food_up}, "
            f"negative steps {negatives}, {elapsed:.1f} s")


# ---------------------------------------------------------------- 2

def test_evaporation_law():
    g = make_grid(20, 20, 0.05)
    p = ModelParams(m0=0.0)
    s = make_state(g, p, v=g.full(1.0))
    dt = 1e-3
    m0 = total_mass(s.v, g)
    for _ in range(1000):
        s = step(s, p, dt)
    ratio = total_mass(s.v, g) / m0
    law = (1 - dt) ** 1000
    ok = abs(ratio - law) <= 1e-12 * law and abs(ratio - math.exp(-1)) <= EVAPORATION_TOL
    verdict(2, "evaporation law", ok,
            f"ratio {ratio:.12f}, (1-dt)^1000 {law:.12f}, |ratio - 1/e| {abs(ratio - math.exp(-1)):.2e}")


# ---------------------------------------------------------------- 3

def test_diffusion_oracle():
    n = 64
    g = make_grid(n, n, 1.0 / n)
    p = ModelParams(alpha1=1.0, alpha2=0.0, gamma=0.0, m0=0.0)
    X, Y = g.cell_centers()
    sigma0 = 0.05
    r2 = (X - 0.5) ** 2 + (Y - 0.5) ** 2
    s0 = make_state(g, p, u=np.exp(-r2 / (2 * sigma0**2)))
    t_end = 0.004
    assert t_end / 80 <= cfl_limits(s0, p).dt_max

    start = time.perf_counter()

    def integrate(steps):
        s = s0
        for _ in range(steps):
            s = step(s, p, t_end / steps)
        return s.u

    coarse, fine, ref = integrate(80), integrate(160), integrate(800)
    elapsed = time.perf_counter() - start

    def l1(a, b):
        return total_mass(np.abs(a - b), g)

    ratio = l1(coarse, ref) / l1(fine, ref)
    var = sigma0**2 + 2 * p.alpha1 * t_end
    exact = sigma0**2 / var * np.exp(-r2 / (2 * var))
    rel = l1(fine, exact) / total_mass(exact, g)
    lo, hi = CONVERGENCE_RATIO
    ok = lo <= ratio <= hi and rel <= GAUSSIAN_L1 and elapsed < DIFFUSION_BUDGET_S
    verdict(3, "diffusion oracle", ok,
            f"error ratio {ratio:.3f}, L1 vs analytic Gaussian {rel:.2e}, {elapsed:.1f} s")


# ---------------------------------------------------------------- 4

def _random_params(rng):
    return ModelParams(
        alpha1=10 ** rng.uniform(-2, 1), alpha2=10 ** rng.uniform(-1, 2), alpha3=10 ** rng.uniform(-2, 1),
        alpha4=10 ** rng.uniform(-1, 1), alpha5=10 ** rng.uniform(-1, 2), gamma=rng.uniform(0, 5),
        u_max=math.inf if rng.random() < 0.3 else 10 ** rng.uniform(-1, 1), m0=rng.uniform(0, 5),
        eps_nest=rng.uniform(0.01, 1),
    )


def _rough(rng, shape):
    # wide dynamic range with many exact zeros
    f = 10 ** rng.uniform(-6, 2, shape)
    return np.where(rng.random(shape) < 0.3, 0.0, f)


def _two_cell_problem(rng):
    # the two active cells sit in a 3x3 grid, the smallest the solver accepts
    g = make_grid(3, 3, 10 ** rng.uniform(-2, 0))
    p = _random_params(rng)
    j, i = rng.integers(0, 2, 2)
    pair = [(j, i), (j, i + 1)] if rng.random() < 0.5 else [(j, i), (j + 1, i)]
    fields = {k: g.zeros() for k in "uwvc"}
    for k in "uw":
        for cell in pair:
            fields[k][cell] = rng.choice([0.0, 10 ** rng.uniform(-6, 2)])
    fields["v"] = _rough(rng, g.shape)
    fields["c"][pair[0]] = rng.uniform(0, 5)
    z = rng.uniform(-1, 1, g.shape) * g.h
    return g, p, make_state(g, p, z=z, nest_center=(rng.uniform(0, g.lx), rng.uniform(0, g.ly)),
                            nest_radius=2 * g.lx, **fields)


def _grid_problem(rng):
    g = make_grid(16, 16, 10 ** rng.uniform(-2, 0))
    p = _random_params(rng)
    X, Y = g.cell_centers()
    hill = Topography("gaussian_hill", (rng.uniform(0, g.lx), rng.uniform(0, g.ly)),
                      rng.uniform(-2, 2) * g.lx, g.lx * rng.uniform(0.05, 0.5))
    return g, p, make_state(g, p, z=topography(hill, (X, Y)),
                            nest_center=(rng.uniform(0.2, 0.8) * g.lx, rng.uniform(0.2, 0.8) * g.ly),
                            **{k: _rough(rng, g.shape) for k in "uwvc"})


def test_upwind_positivity():
    rng = np.random.default_rng(4)
    failures, worst, cases = [], 0.0, 0
    for make in (_two_cell_problem, _grid_problem):
        for _ in range(POSITIVITY_CASES):
            g, p, s = make(rng)
            cases += 1
            try:
                out = step(s, p, cfl_limits(s, p).dt_max)
            except NegativeDensityError as exc:
                failures.append(str(exc))
                continue
            low = min(out.u.min(), out.w.min(), out.v.min(), out.c.min())
            if low < 0:
                failures.append(f"min {low!r}")
                worst = min(worst, low)
    verdict(4, "upwind positivity", not failures,
            f"{cases} problems ({POSITIVITY_CASES} two-cell, {POSITIVITY_CASES} 16x16), "
            f"{len(failures)} negative" + (f", first: {failures[0]}" if failures else ""))


# ---------------------------------------------------------------- 5 and 6

@pytest.fixture(scope="session")
def desk_runs(tmp_path_factory):
    """The desk-scale two-source scenario run twice through the CLI."""
    base = tmp_path_factory.mktemp("desk")
    config = base / "two_sources_desk.toml"
    config.write_text(bundled_config_text("two_sources_desk"))
    outs, codes, times = [], [], []
    for k in range(2):
        out = base / f"run{k}"
        start = time.perf_counter()
        codes.append(cli.main(["run", "--config", str(config), "--out", str(out)]))
        times.append(time.perf_counter() - start)
        outs.append(out)
    return outs, codes, times


def check_events(series, events, s):
    """Problems with the formation/depletion/fade story, as a list of messages."""
    problems = []
    theta_fade = s.events.theta_fade
    for k, (src, ev) in enumerate(zip(s.food, events)):
        left = series[-1][f"food_{k}"]
        if not left < DEPLETED_BELOW * src.amount:
            problems.append(f"food[{k}] not depleted: {left:.3g} of {src.amount}")
        times = [ev.get(key) for key in ("formation_time", "depletion_time", "fade_time")]
        if "never" in times or None in times:
            problems.append(f"food[{k}] events incomplete: {ev}")
            continue
        form, dep, fade = times
        if not form < dep < fade:
            problems.append(f"food[{k}] order {form} / {dep} / {fade}")
        after = [r[f"trail_{k}"] for r in series if r["t"] >= fade]
        if max(after) > theta_fade:
            problems.append(f"food[{k}] trail recovers to {max(after):.3g} after fade")
    return problems


def _events_text(events):
    def fmt(t):
        return t if isinstance(t, str) else f"{t:.2f}"

    return "; ".join(
        f"food[{k}] form {fmt(e['formation_time'])}, deplete {fmt(e['depletion_time'])}, "
        f"fade {fmt(e['fade_time'])}"
        for k, e in enumerate(events))


@pytest.mark.slow
def test_two_source_experiment_desk(desk_runs):
    outs, codes, times = desk_runs
    s = load_bundled("two_sources_desk")
    full = load_bundled("two_sources")
    manifest = json.loads((outs[0] / "manifest.json").read_text())
    series = read_timeseries_csv(outs[0] / "timeseries.csv")
    problems = [] if codes[0] == 0 else [f"exit code {codes[0]}"]
    if (s.grid.nx, s.grid.ny) != (100, 100) or not math.isclose(s.run.dt * s.run.steps,
                                                                full.run.dt * full.run.steps):
        problems.append("desk scenario does not match the reference simulated time")
    if times[0] > 300:
        problems.append(f"took {times[0]:.0f} s")
    problems += check_events(series, manifest["events"], s)
    verdict(5, "two-source experiment, desk scale", not problems,
            "; ".join(problems) if problems else f"{_events_text(manifest['events'])}; {times[0]:.0f} s")


@pytest.mark.full_scale
def test_two_source_experiment_full_scale():
    s = load_bundled("two_sources")
    start = time.perf_counter()
    report = run(s)
    elapsed = time.perf_counter() - start
    series = [dict(zip(r.header(), r.values())) for r in report.series]
    events = report.events.as_dict()
    problems = [] if report.termination == "completed" else [f"{report.termination}: {report.error}"]
    problems += check_events(series, events, s)
    verdict("5p", "two-source experiment, 200x200 / 300,000 steps", not problems,
            "; ".join(problems) if problems else f"{_events_text(events)}; {elapsed / 60:.1f} min")


@pytest.mark.slow
def test_determinism(desk_runs):
    outs, codes, _ = desk_runs
    a, b = outs
    compared, differ = 0, []
    names = ["timeseries.csv"] + sorted(str(p.relative_to(a)) for p in (a / "snapshots").glob("*.pgm"))
    for name in names:
        compared += 1
        if not (b / name).exists() or (a / name).read_bytes() != (b / name).read_bytes():
            differ.append(name)
    ok = codes == [0, 0] and not differ and compared > 1
    verdict(6, "determinism", ok, f"{compared} files compared, {len(differ)} differ"
            + (f": {differ[:3]}" if differ else ""))


# ---------------------------------------------------------------- 7

def test_simplified_model_regression(rng):
    g = make_grid(32, 32, 1.0 / 32)
    p = ModelParams(alpha1=0.4, alpha2=1.5, alpha3=0.1, alpha4=2.0, alpha5=6.0, gamma=0.0,
                    u_max=math.inf, m0=3.0, eps_nest=0.2)
    fields = random_fields(rng, g)
    fields["c"] *= rng.random(g.shape) < 0.2
    s = make_state(g, p, nest_center=(0.4, 0.55), nest_radius=0.1, **fields)
    dt = cfl_limits(s, p).dt_max

    u, w, v, c = (getattr(s, k).tolist() for k in "uwvc")
    mask, weight = s.nest_mask.tolist(), s.nest_weight.tolist()
    vfx, vfy = s.vfield_x.tolist(), s.vfield_y.tolist()
    for _ in range(100):
        s = step(s, p, dt)
        u, w, v, c = simplified_model_step(u, w, v, c, mask, weight, vfx, vfy, g.h, dt,
                                           p.alpha1, p.alpha2, p.alpha3, p.alpha4, p.alpha5, p.m0)
    diff = max(float(np.abs(getattr(s, k) - np.asarray(o)).max()) for k, o in zip("uwvc", (u, w, v, c)))
    verdict(7, "simplified-model regression", diff <= ORACLE_LINF,
            f"L-inf difference {diff:.2e} after 100 steps on 32x32")
