"""Pointwise source terms of the foraging system."""

from __future__ import annotations

import numpy as np

from antforage.grid import Grid, laplacian
from antforage.model import ModelParams, SimState, inflow_rate


def conversion(u: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Rate at which foraging ants find food and turn into returning ants."""
    return u * c


def nest_exchange(u, w, state: SimState, params: ModelParams, t: float):
    """Nest sources ``(du, dw)``: unloading of returning ants plus the inflow.

    Unloading ``alpha5 * w`` acts on every nest cell and reappears there as
    foraging ants, so the two parts cancel cellwise; the inflow is spread
    with ``nest_weight`` (unit mass).
    """
    unload = params.alpha5 * w * state.nest_mask
    du = unload + inflow_rate(t, params) * state.nest_weight
    return du, -unload


def pheromone_rhs(v: np.ndarray, w: np.ndarray, grid: Grid) -> np.ndarray:
    """Deposition by returning ants, unit-rate evaporation and unit diffusion."""
    return w - v + laplacian(v, grid)


def deplete_food(c: np.ndarray, u: np.ndarray, params: ModelParams, dt: float) -> np.ndarray:
    """Exact solution of ``c' = -alpha4 u c`` over ``dt`` with ``u`` frozen."""
    return c * np.exp(-params.alpha4 * u * dt)
