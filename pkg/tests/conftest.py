import math

import numpy as np
import pytest

from antforage.grid import make_grid
from antforage.model import ModelParams, SimState, Topography, nest_field, topography


def pytest_addoption(parser):
    parser.addoption("--full-scale", action="store_true", default=False,
                     help="also run the full 200x200, 300,000-step experiment (~15 min)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full-scale"):
        return
    skip = pytest.mark.skip(reason="full-scale run; enable with --full-scale")
    for item in items:
        if "full_scale" in item.keywords:
            item.add_marker(skip)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_state(grid, params=None, *, u=None, w=None, v=None, c=None, z=None,
               nest_center=None, nest_radius=None, t=0.0):
    """SimState with a disk nest and the homing field; unspecified fields are zero."""
    params = params or ModelParams()
    X, Y = grid.cell_centers()
    if nest_center is None:
        nest_center = (grid.origin[0] + grid.lx / 2, grid.origin[1] + grid.ly / 2)
    if nest_radius is None:
        nest_radius = 1.5 * grid.h
    mask = ((X - nest_center[0]) ** 2 + (Y - nest_center[1]) ** 2 <= nest_radius**2).astype(float)
    assert mask.sum() > 0
    vx, vy = nest_field((X, Y), nest_center, params.eps_nest)
    zero = grid.zeros
    return SimState(
        grid=grid, t=t,
        u=zero() if u is None else np.array(u, dtype=float),
        w=zero() if w is None else np.array(w, dtype=float),
        v=zero() if v is None else np.array(v, dtype=float),
        c=zero() if c is None else np.array(c, dtype=float),
        z=zero() if z is None else np.array(z, dtype=float),
        nest_mask=mask, nest_weight=mask / (mask.sum() * grid.cell_area),
        vfield_x=vx, vfield_y=vy, nest_center=tuple(nest_center),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
