"""Fused time-stepping loops compiled with numba.

They perform exactly the arithmetic of ``solver.strang_step`` and the
reduced-system step, cell by cell, for ``n`` consecutive steps.  The
tests check them against the array-level substeps.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _upwind_into(out, f, nu, periodic):
    n = f.size
    if nu == 0.0:
        for j in range(n):
            out[j] = f[j]
    elif nu > 0.0:
        for j in range(1, n):
            out[j] = f[j] - nu * (f[j] - f[j - 1])
        if periodic:
            out[0] = f[0] - nu * (f[0] - f[n - 1])
        else:
            out[0] = f[0]
    else:
        for j in range(n - 1):
            out[j] = f[j] - nu * (f[j + 1] - f[j])
        if periodic:
            out[n - 1] = f[n - 1] - nu * (f[0] - f[n - 1])
        else:
            out[n - 1] = f[n - 1]


@njit(cache=True)
def full_steps(u, v, w, nsteps, h, dx, k1, k2, k3, a, b, c1, c2, a3, b3, c3, eps2, periodic):
    n = u.size
    tu = np.empty(n)
    tv = np.empty(n)
    tw = np.empty(n)
    ab = a + b
    csum = c1 + c2
    cq = eps2 * (a * c1 - b * c2) / ab
    decay = math.exp(-ab / eps2 * (0.5 * h))
    nu1, nu2, nu3 = k1 * h / dx, k2 * h / dx, k3 * h / dx
    half = 0.5 * h
    for _ in range(nsteps):
        for j in range(n):
            s = u[j] + v[j] + csum * w[j] * half
            q_inf = cq * w[j]
            q = q_inf + (a * u[j] - b * v[j] - q_inf) * decay
            u[j] = (b * s + q) / ab
            v[j] = (a * s - q) / ab
        _upwind_into(tu, u, nu1, periodic)
        _upwind_into(tv, v, nu2, periodic)
        _upwind_into(tw, w, nu3, periodic)
        for j in range(n):
            drive = a3 * tu[j] + b3 * tv[j]
            wh = tw[j] + half * (drive + c3 * tw[j])
            wn = tw[j] + h * (drive + c3 * wh)
            s = tu[j] + tv[j] + csum * wn * half
            q_inf = cq * wn
            q = q_inf + (a * tu[j] - b * tv[j] - q_inf) * decay
            u[j] = (b * s + q) / ab
            v[j] = (a * s - q) / ab
            w[j] = wn


@njit(cache=True)
def _reduced_source(u, w, h, C, c, c3):
    uh = u + 0.5 * h * C * w
    wh = w + 0.5 * h * (c * u + c3 * w)
    return u + h * C * wh, w + h * (c * uh + c3 * wh)


@njit(cache=True)
def reduced_steps(u, w, nsteps, h, dx, V, k3, C, c, c3, periodic):
    n = u.size
    tu = np.empty(n)
    tw = np.empty(n)
    nuV, nu3 = V * h / dx, k3 * h / dx
    half = 0.5 * h
    for _ in range(nsteps):
        for j in range(n):
            u[j], w[j] = _reduced_source(u[j], w[j], half, C, c, c3)
        _upwind_into(tu, u, nuV, periodic)
        _upwind_into(tw, w, nu3, periodic)
        for j in range(n):
            u[j], w[j] = _reduced_source(tu[j], tw[j], half, C, c, c3)
