"""Face fluxes for the two ant equations.

Diffusion uses centered face differences; drift is donor-cell upwinded on the
limited density ``d * beta(d)``. Everything returned here has zero boundary
faces, so :func:`antforage.grid.divergence` conserves mass exactly.
"""

from __future__ import annotations

import numpy as np

from antforage.grid import FaceFluxes, Grid
from antforage.model import ModelParams, SimState, limited


def _face_diff(f: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    return (f[:, 1:] - f[:, :-1]) / h, (f[1:, :] - f[:-1, :]) / h


def diffusive_fluxes_u(u: np.ndarray, v: np.ndarray, grid: Grid, params: ModelParams) -> FaceFluxes:
    """``alpha1 * exp(-gamma * v_face) * grad u`` with ``v_face`` the two-cell mean."""
    gx, gy = _face_diff(u, grid.h)
    if params.gamma == 0.0:
        return FaceFluxes.from_interior(params.alpha1 * gx, params.alpha1 * gy, grid)
    kx = params.alpha1 * np.exp(-params.gamma * 0.5 * (v[:, 1:] + v[:, :-1]))
    ky = params.alpha1 * np.exp(-params.gamma * 0.5 * (v[1:, :] + v[:-1, :]))
    return FaceFluxes.from_interior(kx * gx, ky * gy, grid)


def diffusive_fluxes_w(w: np.ndarray, grid: Grid, params: ModelParams) -> FaceFluxes:
    gx, gy = _face_diff(w, grid.h)
    return FaceFluxes.from_interior(params.alpha3 * gx, params.alpha3 * gy, grid)


def drift_velocity_u(v: np.ndarray, z: np.ndarray, grid: Grid, params: ModelParams) -> FaceFluxes:
    """Face velocity ``alpha2 * grad v - grad z``: up the pheromone, down the terrain."""
    vx, vy = _face_diff(v, grid.h)
    zx, zy = _face_diff(z, grid.h)
    return FaceFluxes.from_interior(params.alpha2 * vx - zx, params.alpha2 * vy - zy, grid)


def drift_velocity_w(state: SimState, params: ModelParams) -> FaceFluxes:
    """Face velocity ``alpha2 * <nest field> - grad z``, nest field averaged over the two cells."""
    grid = state.grid
    ex = 0.5 * (state.vfield_x[:, 1:] + state.vfield_x[:, :-1])
    ey = 0.5 * (state.vfield_y[1:, :] + state.vfield_y[:-1, :])
    zx, zy = _face_diff(state.z, grid.h)
    return FaceFluxes.from_interior(params.alpha2 * ex - zx, params.alpha2 * ey - zy, grid)


def upwind_fluxes(density: np.ndarray, vel: FaceFluxes, params: ModelParams) -> FaceFluxes:
    """Donor-cell flux ``a * q(donor)`` with ``q = d * beta(d)``."""
    q = limited(density, params)
    ax = vel.x_faces[:, 1:-1]
    ay = vel.y_faces[1:-1, :]
    fx = np.where(ax >= 0.0, ax * q[:, :-1], ax * q[:, 1:])
    fy = np.where(ay >= 0.0, ay * q[:-1, :], ay * q[1:, :])
    return FaceFluxes.from_interior(fx, fy, vel.grid)


def max_outflow_speed(vel: FaceFluxes) -> float:
    """Largest total outgoing face speed of any cell (sum over its four faces)."""
    ax, ay = vel.x_faces, vel.y_faces
    out = (
        np.maximum(ax[:, 1:], 0.0)
        + np.maximum(-ax[:, :-1], 0.0)
        + np.maximum(ay[1:, :], 0.0)
        + np.maximum(-ay[:-1, :], 0.0)
    )
    return float(out.max())
