"""Fused compiled Euler step.

Evaluates the discrete formulas assembled by :mod:`antforage.fluxes` and
:mod:`antforage.reactions` cell by cell, in the same operation order except
that the face factor ``exp(-gamma * mean(v))`` is formed as the product of
two per-cell exponentials computed beforehand. ``tests/test_stepper.py`` pins it to the modular
numpy path at rounding level.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _q(d, u_max):
    if math.isinf(u_max):
        return d
    return d * max(0.0, 1.0 - d / u_max)


@njit(cache=True)
def _up(a, ql, qr):
    return a * ql if a >= 0.0 else a * qr


@njit(cache=True)
def euler_step(u, w, v, c, z, ev, nest_mask, nest_weight, vel_wx, vel_wy,
               h, h2, dt, a1, a2, a3, a5, gamma, u_max, inflow,
               u_out, w_out, v_out, dw_out):
    """Fill ``u_out, w_out, v_out`` and the nest term ``dw_out``.

    ``ev`` holds ``exp(-gamma * v / 2)`` per cell (ignored when gamma is 0);
    food is updated outside since its exponential update is cellwise.
    """
    ny, nx = u.shape
    fxu = np.zeros((ny, nx + 1))
    fxw = np.zeros((ny, nx + 1))
    fyu = np.zeros((ny + 1, nx))
    fyw = np.zeros((ny + 1, nx))

    for j in range(ny):
        for i in range(1, nx):
            gx = (u[j, i] - u[j, i - 1]) / h
            if gamma == 0.0:
                du = a1 * gx
            else:
                du = a1 * (ev[j, i] * ev[j, i - 1]) * gx
            a = a2 * ((v[j, i] - v[j, i - 1]) / h) - (z[j, i] - z[j, i - 1]) / h
            fxu[j, i] = _up(a, _q(u[j, i - 1], u_max), _q(u[j, i], u_max)) - du
            dw = a3 * ((w[j, i] - w[j, i - 1]) / h)
            fxw[j, i] = _up(vel_wx[j, i], _q(w[j, i - 1], u_max), _q(w[j, i], u_max)) - dw
    for j in range(1, ny):
        for i in range(nx):
            gy = (u[j, i] - u[j - 1, i]) / h
            if gamma == 0.0:
                du = a1 * gy
            else:
                du = a1 * (ev[j, i] * ev[j - 1, i]) * gy
            a = a2 * ((v[j, i] - v[j - 1, i]) / h) - (z[j, i] - z[j - 1, i]) / h
            fyu[j, i] = _up(a, _q(u[j - 1, i], u_max), _q(u[j, i], u_max)) - du
            dw = a3 * ((w[j, i] - w[j - 1, i]) / h)
            fyw[j, i] = _up(vel_wy[j, i], _q(w[j - 1, i], u_max), _q(w[j, i], u_max)) - dw

    for j in range(ny):
        jn = j + 1 if j + 1 < ny else j
        js = j - 1 if j > 0 else j
        for i in range(nx):
            ie = i + 1 if i + 1 < nx else i
            iw = i - 1 if i > 0 else i
            div_u = ((fxu[j, i + 1] - fxu[j, i]) + (fyu[j + 1, i] - fyu[j, i])) / h
            div_w = ((fxw[j, i + 1] - fxw[j, i]) + (fyw[j + 1, i] - fyw[j, i])) / h
            conv = u[j, i] * c[j, i]
            unload = a5 * w[j, i] * nest_mask[j, i]
            du_nest = unload + inflow * nest_weight[j, i]
            dw_nest = -unload
            u_out[j, i] = u[j, i] + dt * (-div_u - conv + du_nest)
            w_out[j, i] = w[j, i] + dt * (-div_w + conv + dw_nest)
            vc = v[j, i]
            lap = (v[j, ie] + v[j, iw] + v[jn, i] + v[js, i] - 4.0 * vc) / h2
            v_out[j, i] = vc + dt * (w[j, i] - vc + lap)
            dw_out[j, i] = dw_nest
