"""
Uniform square grid, cell-centered fields and the discrete operators on them.

Fields are plain ``numpy`` arrays of shape ``(ny, nx)`` indexed ``f[j, i]``;
row-major flattening gives the cell index ``j*nx + i``. Cell ``(i, j)`` has its
center at ``origin + ((i + 1/2) h, (j + 1/2) h)``.

Face quantities live in :class:`FaceFluxes`: ``x_faces[j, i]`` is the face
between cells ``(i-1, j)`` and ``(i, j)`` (shape ``(ny, nx+1)``), ``y_faces[j, i]``
the face between ``(i, j-1)`` and ``(i, j)`` (shape ``(ny+1, nx)``). Positive
values point toward increasing ``i`` / ``j``. Boundary faces are zero flux.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    h: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise ValueError(f"cell counts must be integers, got nx={self.nx}, ny={self.ny}")
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3x3 cells, got {self.nx}x{self.ny}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"cell size h must be positive, got {self.h}")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def ncells(self) -> int:
        return self.nx * self.ny

    @property
    def lx(self) -> float:
        return self.nx * self.h

    @property
    def ly(self) -> float:
        return self.ny * self.h

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    def x_centers(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.nx) + 0.5) * self.h

    def y_centers(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.ny) + 0.5) * self.h

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` coordinate arrays of shape ``(ny, nx)``."""
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing="xy")

    def contains(self, p) -> bool:
        x, y = p
        x0, y0 = self.origin
        return x0 <= x <= x0 + self.lx and y0 <= y <= y0 + self.ly

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def full(self, value: float) -> np.ndarray:
        return np.full(self.shape, float(value))


def make_grid(nx: int, ny: int, h: float, origin=(0.0, 0.0)) -> Grid:
    return Grid(nx, ny, float(h), tuple(origin))


@dataclass
class FaceFluxes:
    """Normal quantities (fluxes or velocities) on the cell faces of a grid."""

    x_faces: np.ndarray
    y_faces: np.ndarray
    grid: Grid = field(repr=False)

    @classmethod
    def zeros(cls, grid: Grid) -> FaceFluxes:
        return cls(np.zeros((grid.ny, grid.nx + 1)), np.zeros((grid.ny + 1, grid.nx)), grid)

    @classmethod
    def from_interior(cls, fx: np.ndarray, fy: np.ndarray, grid: Grid) -> FaceFluxes:
        """Wrap interior-face arrays (``(ny, nx-1)`` and ``(ny-1, nx)``), padding boundaries with 0."""
        out = cls.zeros(grid)
        out.x_faces[:, 1:-1] = fx
        out.y_faces[1:-1, :] = fy
        return out

    def boundary_is_zero(self) -> bool:
        return not (
            np.any(self.x_faces[:, 0])
            or np.any(self.x_faces[:, -1])
            or np.any(self.y_faces[0, :])
            or np.any(self.y_faces[-1, :])
        )

    def __add__(self, other: FaceFluxes) -> FaceFluxes:
        return FaceFluxes(self.x_faces + other.x_faces, self.y_faces + other.y_faces, self.grid)

    def __neg__(self) -> FaceFluxes:
        return FaceFluxes(-self.x_faces, -self.y_faces, self.grid)

    def scaled(self, a: float) -> FaceFluxes:
        return FaceFluxes(a * self.x_faces, a * self.y_faces, self.grid)


def laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Five-point Laplacian with mirror ghost cells (homogeneous Neumann)."""
    g = np.pad(f, 1, mode="edge")
    return (g[1:-1, 2:] + g[1:-1, :-2] + g[2:, 1:-1] + g[:-2, 1:-1] - 4.0 * f) / grid.h**2


def divergence(F: FaceFluxes, grid: Grid | None = None) -> np.ndarray:
    """Cellwise net outflow per unit area, ``(Fx[i+1] - Fx[i] + Fy[j+1] - Fy[j]) / h``.

    A positive face value moves mass from the lower-index cell to the
    higher-index one, so the donor's divergence is positive.
    """
    grid = grid or F.grid
    if not F.boundary_is_zero():
        raise ValueError("face fluxes must vanish on the domain boundary (no-flux contract)")
    fx, fy = F.x_faces, F.y_faces
    return ((fx[:, 1:] - fx[:, :-1]) + (fy[1:, :] - fy[:-1, :])) / grid.h


def total_mass(f: np.ndarray, grid: Grid) -> float:
    # np.sum over a C-contiguous ravel uses a fixed pairwise order
    return float(np.sum(np.ascontiguousarray(f).ravel()) * grid.cell_area)


def interp_bilinear(f: np.ndarray, grid: Grid, p) -> float:
    """Bilinear interpolation between the four cell centers around ``p``.

    Points outside the hull of cell centers are clamped onto it, so the
    boundary ring of cells is extended as a constant.
    """
    fi = (p[0] - grid.origin[0]) / grid.h - 0.5
    fj = (p[1] - grid.origin[1]) / grid.h - 0.5
    fi = min(max(fi, 0.0), grid.nx - 1.0)
    fj = min(max(fj, 0.0), grid.ny - 1.0)
    i0 = min(int(np.floor(fi)), grid.nx - 2)
    j0 = min(int(np.floor(fj)), grid.ny - 2)
    s = fi - i0
    t = fj - j0
    return float(
        (1 - s) * (1 - t) * f[j0, i0]
        + s * (1 - t) * f[j0, i0 + 1]
        + (1 - s) * t * f[j0 + 1, i0]
        + s * t * f[j0 + 1, i0 + 1]
    )
