"""Temporal convergence of the explicit Euler stepper.

Integrates a Gaussian bump (pure diffusion) and a full-model smoke problem to
a fixed time with successively halved steps and reports the L1 error against
a run with a ten times smaller step. First order shows as ratios near 2.
"""

import argparse

import numpy as np

from antforage.grid import make_grid, total_mass
from antforage.model import ModelParams, SimState, nest_field
from antforage.stepper import cfl_limits, step


def state(grid, params, u, w=None, v=None, c=None):
    X, Y = grid.cell_centers()
    center = (grid.lx / 2, grid.ly / 2)
    mask = ((X - center[0]) ** 2 + (Y - center[1]) ** 2 <= (1.5 * grid.h) ** 2).astype(float)
    vx, vy = nest_field((X, Y), center, params.eps_nest)
    z = grid.zeros()
    return SimState(grid=grid, t=0.0, u=u, w=grid.zeros() if w is None else w,
                    v=grid.zeros() if v is None else v, c=grid.zeros() if c is None else c, z=z,
                    nest_mask=mask, nest_weight=mask / (mask.sum() * grid.cell_area),
                    vfield_x=vx, vfield_y=vy, nest_center=center)


def integrate(s0, params, t_end, n):
    s = s0
    for _ in range(n):
        s = step(s, params, t_end / n)
    return s


def study(name, s0, params, t_end, base, levels):
    g = s0.grid
    ref = integrate(s0, params, t_end, 10 * base * 2 ** (levels - 1))
    errors = []
    for k in range(levels):
        s = integrate(s0, params, t_end, base * 2**k)
        errors.append(sum(total_mass(np.abs(getattr(s, f) - getattr(ref, f)), g) for f in "uwvc"))
    print(name)
    for k, e in enumerate(errors):
        ratio = "" if k == 0 else f"  ratio {errors[k - 1] / e:.3f}"
        print(f"  steps {base * 2**k:6d}  L1 error {e:.3e}{ratio}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64, help="cells per side")
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()

    g = make_grid(args.n, args.n, 1.0 / args.n)
    X, Y = g.cell_centers()
    bump = np.exp(-((X - 0.5) ** 2 + (Y - 0.5) ** 2) / (2 * 0.05**2))

    p = ModelParams(alpha2=0.0, m0=0.0)
    s0 = state(g, p, bump.copy())
    t_end = 80 * cfl_limits(s0, p).dt_max
    study("diffusion only", s0, p, t_end, 80, args.levels)

    p = ModelParams(alpha1=0.5, alpha2=1.0, alpha3=0.2, alpha5=5.0, gamma=1.0, u_max=8.0, m0=1.0)
    s0 = state(g, p, 2 * bump, w=bump[::-1].copy(), v=0.5 * bump.T.copy(),
               c=3.0 * (np.hypot(X - 0.7, Y - 0.3) < 0.15))
    t_end = 80 * cfl_limits(s0, p).dt_max
    study("full model", s0, p, t_end, 80, args.levels)


if __name__ == "__main__":
    main()
