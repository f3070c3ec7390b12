"""Brute-force solver for the full stiff system.

First-order upwind transport and an exact update of the stiff relaxation
block, composed by Strang splitting::

    relax(dt/2) -> transport(dt) -> relax(dt/2)

The relaxation block is solved in closed form, so ``dt`` is never limited
by ``eps^2``; only the transport CFL condition applies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import BadSolverConfig, CFLViolation, NonFiniteState
from .initial_data import FieldTriple, Grid1D
from .model import ModelParams, ensure_valid

# relative slack when comparing a Courant number against 1
_CFL_SLACK = 1e-12


class Boundary(str, Enum):
    OUTFLOW = "outflow"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.9
    output_times: tuple[float, ...] = (0.0,)
    boundary: Boundary = Boundary.OUTFLOW
    dt_max: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "output_times", tuple(float(t) for t in self.output_times))
        if not 0.0 < self.cfl <= 1.0:
            raise BadSolverConfig(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.output_times:
            raise BadSolverConfig("output_times must not be empty")
        times = self.output_times
        if any(not math.isfinite(t) or t < 0 for t in times):
            raise BadSolverConfig(f"output_times must be finite and non-negative, got {times}")
        if any(t1 < t0 for t0, t1 in zip(times, times[1:])):
            raise BadSolverConfig(f"output_times must be sorted, got {times}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise BadSolverConfig(f"dt_max must be positive, got {self.dt_max}")

    def check_horizon(self, T: float) -> None:
        if self.output_times[-1] > T * (1 + 1e-12):
            raise BadSolverConfig(f"output time {self.output_times[-1]} exceeds horizon T={T}")


@dataclass
class SolutionTrace:
    snapshots: list[FieldTriple]
    dx: float
    dt: float
    steps: int
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.snapshots]

    def at(self, t: float) -> FieldTriple:
        for snap in self.snapshots:
            if snap.t == t:
                return snap
        raise KeyError(t)


def stable_dt(vp: ModelParams, grid: Grid1D | float, cfl: float) -> float:
    dx = grid.dx if isinstance(grid, Grid1D) else float(grid)
    return _stable_dt_for_speeds((vp.k1, vp.k2, vp.k3), dx, cfl)


def _stable_dt_for_speeds(speeds: Sequence[float], dx: float, cfl: float) -> float:
    if not 0.0 < cfl <= 1.0:
        raise BadSolverConfig(f"cfl must lie in (0, 1], got {cfl}")
    smax = max(abs(s) for s in speeds)
    if smax == 0.0:
        return cfl * dx
    return cfl * dx / smax


def relaxation_substep(state: FieldTriple, vp: ModelParams, dt: float) -> FieldTriple:
    """Exact solution of the fast (u, v) subsystem over ``dt`` with ``w`` frozen.

    In the variables ``s = u + v`` and ``q = a u - b v`` the subsystem
    decouples: ``s`` grows linearly and ``q`` relaxes exponentially to
    ``q_inf`` at rate ``(a + b) / eps^2``.
    """
    a, b, eps2 = vp.a, vp.b, vp.epsilon**2
    u, v, w = state.u, state.v, state.w
    s = u + v + (vp.c1 + vp.c2) * w * dt
    q_inf = eps2 * (a * vp.c1 - b * vp.c2) * w / (a + b)
    decay = math.exp(-(a + b) / eps2 * dt)
    q = q_inf + (a * u - b * v - q_inf) * decay
    return FieldTriple((b * s + q) / (a + b), (a * s - q) / (a + b), w.copy(), state.t)


def upwind(f: np.ndarray, speed: float, dt: float, dx: float, boundary: Boundary) -> np.ndarray:
    """One first-order upwind step for ``f_t + speed f_x = 0``."""
    nu = speed * dt / dx
    if abs(nu) > 1.0 + _CFL_SLACK:
        raise CFLViolation(f"Courant number {abs(nu):.6g} exceeds 1 (speed={speed}, dt={dt}, dx={dx})")
    if nu == 0.0:
        return f.copy()
    if boundary is Boundary.PERIODIC:
        if nu > 0:
            return f - nu * (f - np.roll(f, 1))
        return f - nu * (np.roll(f, -1) - f)
    out = np.empty_like(f)
    if nu > 0:
        out[1:] = f[1:] - nu * (f[1:] - f[:-1])
        out[0] = f[0]
    else:
        out[:-1] = f[:-1] - nu * (f[1:] - f[:-1])
        out[-1] = f[-1]
    return out


def transport_substep(
    state: FieldTriple,
    vp: ModelParams,
    dt: float,
    grid: Grid1D,
    boundary: Boundary | str = Boundary.OUTFLOW,
) -> FieldTriple:
    boundary = Boundary(boundary)
    dx = grid.dx
    u = upwind(state.u, vp.k1, dt, dx, boundary)
    v = upwind(state.v, vp.k2, dt, dx, boundary)
    w = upwind(state.w, vp.k3, dt, dx, boundary)
    # slow source on w, u and v frozen: explicit midpoint
    drive = vp.a3 * u + vp.b3 * v
    w_half = w + 0.5 * dt * (drive + vp.c3 * w)
    w = w + dt * (drive + vp.c3 * w_half)
    return FieldTriple(u, v, w, state.t)


def strang_step(state: FieldTriple, vp: ModelParams, dt: float, grid: Grid1D, boundary: Boundary) -> FieldTriple:
    half = relaxation_substep(state, vp, 0.5 * dt)
    moved = transport_substep(half, vp, dt, grid, boundary)
    out = relaxation_substep(moved, vp, 0.5 * dt)
    out.t = state.t + dt
    return out


def plan_dt(vp: ModelParams, grid: Grid1D, config: SolverConfig) -> float:
    dt = stable_dt(vp, grid, config.cfl)
    if config.dt_max is not None:
        dt = min(dt, config.dt_max)
    eps2 = vp.epsilon**2
    if any(0.0 < t < eps2 for t in config.output_times):
        # resolve the initial layer for accurate early snapshots
        dt = min(dt, eps2 / 10.0)
    return dt


def march(state, t_targets, dt, advance, check):
    """Advance ``state`` through ``t_targets`` with steps no longer than ``dt``.

    Each interval is split into equal sub-steps so snapshots land exactly on
    the requested times.  ``advance(state, h, n)`` performs ``n`` steps of
    size ``h``.  Returns the snapshots and the total step count.
    """
    snapshots = []
    steps = 0
    t = state.t
    for target in t_targets:
        span = target - t
        if span > 0:
            n = max(1, math.ceil(span / dt * (1 - 1e-12)))
            state = advance(state, span / n, n)
            steps += n
            state.t = target
            t = target
            check(state)
        snapshots.append(state.copy())
    return snapshots, steps


def _check_finite(state: FieldTriple) -> None:
    if not state.is_finite():
        raise NonFiniteState(f"non-finite values at t={state.t:.6g}")


def solve_full(vp: ModelParams, grid: Grid1D, ic: FieldTriple, config: SolverConfig) -> SolutionTrace:
    vp = ensure_valid(vp)
    config.check_horizon(vp.T)
    if len(ic) != grid.n_cells:
        raise BadSolverConfig(f"initial data has {len(ic)} cells, grid has {grid.n_cells}")
    _check_finite(ic)
    dt = plan_dt(vp, grid, config)
    boundary = config.boundary

    periodic = boundary is Boundary.PERIODIC
    dx = grid.dx
    smax = max(abs(vp.k1), abs(vp.k2), abs(vp.k3))

    def advance(state: FieldTriple, h: float, n: int) -> FieldTriple:
        if smax * h / dx > 1.0 + _CFL_SLACK:
            raise CFLViolation(f"Courant number {smax * h / dx:.6g} exceeds 1")
        u, v, w = state.u.copy(), state.v.copy(), state.w.copy()
        _kernels.full_steps(
            u, v, w, n, h, dx, vp.k1, vp.k2, vp.k3, vp.a, vp.b,
            vp.c1, vp.c2, vp.a3, vp.b3, vp.c3, vp.epsilon**2, periodic,
        )
        return FieldTriple(u, v, w, state.t + n * h)

    start = ic.copy()
    start.t = 0.0
    snapshots, steps = march(start, config.output_times, dt, advance, _check_finite)
    return SolutionTrace(snapshots, dx=grid.dx, dt=dt, steps=steps, meta={"solver": "full"})
