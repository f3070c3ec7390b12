"""Zeroth-order asymptotic expansion of the fast/slow system.

The main term is the regular part (u0, (a/b) u0, w0), where (u0, w0)
solve the reduced system::

    u0_t + V  u0_x = C w0
    w0_t + k3 w0_x = c u0 + c3 w0

plus an initial-layer correction (psi, -psi, 0) * exp(-(a + b) t / eps^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BadSolverConfig, CFLViolation, InsufficientSnapshots, NonFiniteState, ShapeMismatch
from .initial_data import FieldTriple, Grid1D
from .model import DerivedConstants, ModelParams, derive_constants, ensure_valid
from .solver import _CFL_SLACK, Boundary, SolverConfig, _stable_dt_for_speeds, march, upwind

EXPANSION_ORDER = 0


@dataclass
class RegularPart:
    ubar0: np.ndarray
    wbar0: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.ubar0 = np.asarray(self.ubar0, dtype=float)
        self.wbar0 = np.asarray(self.wbar0, dtype=float)
        if self.ubar0.shape != self.wbar0.shape or self.ubar0.ndim != 1:
            raise ShapeMismatch("ubar0 and wbar0 must be 1-D arrays of equal length")
        self.t = float(self.t)

    def __len__(self) -> int:
        return self.ubar0.size

    def copy(self) -> "RegularPart":
        return RegularPart(self.ubar0.copy(), self.wbar0.copy(), self.t)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.ubar0).all() and np.isfinite(self.wbar0).all())


@dataclass
class LayerAmplitude:
    psi: np.ndarray


def reduced_initial_data(ic: FieldTriple, vp: ModelParams) -> RegularPart:
    a, b = vp.a, vp.b
    return RegularPart(b / (a + b) * (ic.u + ic.v), ic.w.copy(), 0.0)


def psi_field(ic: FieldTriple, vp: ModelParams) -> LayerAmplitude:
    a, b = vp.a, vp.b
    return LayerAmplitude((a * ic.u - b * ic.v) / (a + b))


def _reduced_source_step(u, w, consts: DerivedConstants, c3: float, h: float):
    # explicit midpoint for (u, w)' = (C w, c u + c3 w)
    uh = u + 0.5 * h * consts.Ccap * w
    wh = w + 0.5 * h * (consts.clow * u + c3 * w)
    return u + h * consts.Ccap * wh, w + h * (consts.clow * uh + c3 * wh)


def reduced_step(state: RegularPart, vp: ModelParams, h: float, grid: Grid1D, boundary: Boundary) -> RegularPart:
    """One array-level step of the reduced solver (sources split around upwind advection)."""
    consts = derive_constants(vp)
    u, w = _reduced_source_step(state.ubar0, state.wbar0, consts, vp.c3, 0.5 * h)
    u = upwind(u, consts.V, h, grid.dx, boundary)
    w = upwind(w, vp.k3, h, grid.dx, boundary)
    u, w = _reduced_source_step(u, w, consts, vp.c3, 0.5 * h)
    return RegularPart(u, w, state.t + h)


def reduced_dt(vp: ModelParams, grid: Grid1D, config: SolverConfig) -> float:
    consts = derive_constants(vp)
    dt = _stable_dt_for_speeds((consts.V, vp.k3), grid.dx, config.cfl)
    if config.dt_max is not None:
        dt = min(dt, config.dt_max)
    return dt


def solve_reduced(
    vp: ModelParams, grid: Grid1D, rp0: RegularPart, config: SolverConfig
) -> list[RegularPart]:
    """Integrate the reduced system from ``rp0`` to each output time.

    Upwind advection (speeds V and k3) with the coupling sources split
    symmetrically around it.
    """
    vp = ensure_valid(vp)
    config.check_horizon(vp.T)
    if len(rp0) != grid.n_cells:
        raise BadSolverConfig(f"initial data has {len(rp0)} cells, grid has {grid.n_cells}")
    consts = derive_constants(vp)
    dx, boundary, c3 = grid.dx, config.boundary, vp.c3
    dt = reduced_dt(vp, grid, config)

    smax = max(abs(consts.V), abs(vp.k3))
    periodic = boundary is Boundary.PERIODIC

    def advance(state: RegularPart, h: float, n: int) -> RegularPart:
        if smax * h / dx > 1.0 + _CFL_SLACK:
            raise CFLViolation(f"Courant number {smax * h / dx:.6g} exceeds 1")
        u, w = state.ubar0.copy(), state.wbar0.copy()
        _kernels.reduced_steps(u, w, n, h, dx, consts.V, vp.k3, consts.Ccap, consts.clow, c3, periodic)
        return RegularPart(u, w, state.t + n * h)

    def check(state: RegularPart) -> None:
        if not state.is_finite():
            raise NonFiniteState(f"non-finite reduced solution at t={state.t:.6g}")

    start = rp0.copy()
    start.t = 0.0
    snapshots, _ = march(start, config.output_times, dt, advance, check)
    return snapshots


def regular_triple(rp: RegularPart, vp: ModelParams) -> FieldTriple:
    return FieldTriple(rp.ubar0.copy(), (vp.a / vp.b) * rp.ubar0, rp.wbar0.copy(), rp.t)


def boundary_layer_triple(amp: LayerAmplitude, vp: ModelParams, t: float) -> FieldTriple:
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    tau = t / vp.epsilon**2
    layer = amp.psi * math.exp(-(vp.a + vp.b) * tau)
    return FieldTriple(layer, -layer, np.zeros_like(layer), t)


def assemble_main_term(reg: FieldTriple, layer: FieldTriple) -> FieldTriple:
    if len(reg) != len(layer):
        raise ShapeMismatch(f"regular part has {len(reg)} cells, layer has {len(layer)}")
    if not math.isclose(reg.t, layer.t, rel_tol=1e-12, abs_tol=1e-15):
        raise ShapeMismatch(f"time stamps differ: {reg.t} vs {layer.t}")
    return FieldTriple(reg.u + layer.u, reg.v + layer.v, reg.w + layer.w, reg.t)


def main_term(ic: FieldTriple, vp: ModelParams, grid: Grid1D, config: SolverConfig) -> list[FieldTriple]:
    """Main term of the expansion at every output time of ``config``."""
    vp = ensure_valid(vp)
    amp = psi_field(ic, vp)
    regular = solve_reduced(vp, grid, reduced_initial_data(ic, vp), config)
    return [
        assemble_main_term(regular_triple(rp, vp), boundary_layer_triple(amp, vp, rp.t)) for rp in regular
    ]


def check_second_order_form(snapshots: list[RegularPart], vp: ModelParams, grid: Grid1D) -> float:
    """Discrete residual of the factored second-order equation for u0.

    ``(d_t + V d_x)(d_t + k3 d_x) u0 - c3 (d_t + V d_x) u0 - D u0`` is
    evaluated with central differences at interior cells of every interior
    snapshot; the largest dx-weighted L1 norm is returned, normalized by the
    L1 norm of u0.
    """
    if len(snapshots) < 3:
        raise InsufficientSnapshots(f"need at least 3 snapshots, got {len(snapshots)}")
    times = np.array([s.t for s in snapshots])
    gaps = np.diff(times)
    if np.any(gaps <= 0) or not np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0):
        raise InsufficientSnapshots("snapshots must be uniformly spaced in time")
    consts = derive_constants(vp)
    V, k3, c3, D = consts.V, vp.k3, vp.c3, consts.D
    ht, dx = gaps[0], grid.dx
    U = np.stack([s.ubar0 for s in snapshots])
    scale = float(np.max(np.sum(np.abs(U), axis=1) * dx))
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for n in range(1, len(snapshots) - 1):
        um, u0, up = U[n - 1], U[n], U[n + 1]
        u_tt = (up - 2 * u0 + um)[1:-1] / ht**2
        u_xt = (up[2:] - up[:-2] - um[2:] + um[:-2]) / (4 * dx * ht)
        u_xx = (u0[2:] - 2 * u0[1:-1] + u0[:-2]) / dx**2
        u_t = (up - um)[1:-1] / (2 * ht)
        u_x = (u0[2:] - u0[:-2]) / (2 * dx)
        res = u_tt + (V + k3) * u_xt + k3 * V * u_xx - c3 * (u_t + V * u_x) - D * u0[1:-1]
        worst = max(worst, float(np.sum(np.abs(res)) * dx))
    return worst / scale
