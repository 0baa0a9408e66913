"""Model coefficients, simulation state and the static ingredients of the model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from antforage.grid import Grid


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the nondimensional foraging system.

    ``alpha2`` is shared by pheromone taxis of foraging ants and by the
    nestward transport of returning ants. ``u_max = math.inf`` disables the
    overcrowding limiter. ``m0`` is the total rate of ants leaving the nest,
    spread over the nest cells.
    """

    alpha1: float = 1.0
    alpha2: float = 1.0
    alpha3: float = 1.0
    alpha4: float = 1.0
    alpha5: float = 1.0
    gamma: float = 0.0
    u_max: float = math.inf
    m0: float = 1.0
    t_inflow: float = math.inf
    eps_nest: float = 0.1

    def __post_init__(self):
        for name in ("alpha1", "alpha3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("alpha2", "alpha4", "alpha5", "gamma", "m0", "t_inflow"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "gamma", "m0", "eps_nest"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
        if not self.u_max > 0:
            raise ValueError(f"u_max must be > 0 or inf, got {self.u_max}")
        if not self.eps_nest > 0:
            raise ValueError(f"eps_nest must be > 0, got {self.eps_nest}")

    def with_(self, **changes) -> ModelParams:
        return replace(self, **changes)


@dataclass
class SimState:
    """Time, the four evolving fields and the static fields of one simulation.

    ``inflow_total`` and ``unloaded_total`` accumulate the ants injected at the
    nest and the returning-ant mass unloaded there; they are bookkeeping only.
    """

    grid: Grid
    t: float
    u: np.ndarray
    w: np.ndarray
    v: np.ndarray
    c: np.ndarray
    z: np.ndarray
    nest_mask: np.ndarray
    nest_weight: np.ndarray
    vfield_x: np.ndarray
    vfield_y: np.ndarray
    nest_center: tuple[float, float] = (0.0, 0.0)
    inflow_total: float = 0.0
    unloaded_total: float = 0.0
    step_index: int = 0
    # derived static quantities shared along a run; never part of the physics state
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for name in ("z", "nest_mask", "nest_weight", "vfield_x", "vfield_y"):
            getattr(self, name).setflags(write=False)

    def fields(self) -> dict[str, np.ndarray]:
        return {"u": self.u, "w": self.w, "v": self.v, "c": self.c}

    def copy(self) -> SimState:
        return replace(self, u=self.u.copy(), w=self.w.copy(), v=self.v.copy(), c=self.c.copy())


@dataclass(frozen=True)
class StepLimits:
    dt_diffusion: float
    dt_advection: float
    dt_reaction: float
    dt_max: float


def beta(density, params: ModelParams):
    """Volume-filling limiter ``max(0, 1 - d/u_max)``; 1 when uncapped."""
    if math.isinf(params.u_max):
        return np.ones_like(density, dtype=float) if isinstance(density, np.ndarray) else 1.0
    out = np.maximum(0.0, 1.0 - np.asarray(density, dtype=float) / params.u_max)
    return out if isinstance(density, np.ndarray) else float(out)


def limited(density, params: ModelParams):
    """The transported quantity ``d * beta(d)``."""
    if math.isinf(params.u_max):
        return density
    return density * beta(density, params)


def nest_field(p, nest_center, eps: float):
    """Nest-bound unit field with a linear ramp inside radius ``eps``.

    Accepts scalar points or coordinate arrays ``(X, Y)``; returns the
    matching ``(vx, vy)``.
    """
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    dx = nest_center[0] - np.asarray(p[0], dtype=float)
    dy = nest_center[1] - np.asarray(p[1], dtype=float)
    scale = np.maximum(np.hypot(dx, dy), eps)
    vx, vy = dx / scale, dy / scale
    if np.ndim(vx) == 0:
        return float(vx), float(vy)
    return vx, vy


@dataclass(frozen=True)
class Topography:
    kind: str = "flat"
    center: tuple[float, float] = (0.0, 0.0)
    amplitude: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("flat", "gaussian_hill"):
            raise ValueError(f"unknown topography preset {self.kind!r}")
        if self.kind == "gaussian_hill" and not self.sigma > 0:
            raise ValueError(f"gaussian_hill sigma must be > 0, got {self.sigma}")


def topography(preset: Topography, p):
    """Terrain height of ``preset`` at point(s) ``p``."""
    x = np.asarray(p[0], dtype=float)
    y = np.asarray(p[1], dtype=float)
    if preset.kind == "flat":
        out = np.zeros(np.broadcast(x, y).shape)
    else:
        r2 = (x - preset.center[0]) ** 2 + (y - preset.center[1]) ** 2
        out = preset.amplitude * np.exp(-r2 / (2.0 * preset.sigma**2))
    return float(out) if np.ndim(out) == 0 else out


def inflow_rate(t: float, params: ModelParams) -> float:
    """Total nest outflow ``m0`` on the half-open interval ``[0, t_inflow)``."""
    return params.m0 if t < params.t_inflow else 0.0
