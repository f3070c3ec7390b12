"""Measurement layer: error norms, fits, layer location, oracles."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientSnapshots, NonPositiveData, ShapeMismatch, TooShort
from .initial_data import FieldTriple, Grid1D
from .model import ModelParams
from .solver import SolutionTrace

logger = logging.getLogger(__name__)

COMPONENTS = ("u", "v", "w")


@dataclass
class ErrorReport:
    sup_norm: float
    l1_norm: float
    components: dict[str, tuple[float, float]] = field(default_factory=dict)

    def sup(self, component: str) -> float:
        return self.components[component][0]

    def l1(self, component: str) -> float:
        return self.components[component][1]


@dataclass
class FitResult:
    value: float
    r_squared: float
    points_used: int


def error_norms(A: FieldTriple, B: FieldTriple, grid: Grid1D | float) -> ErrorReport:
    """Sup and dx-weighted L1 norms of ``A - B``, per component and overall."""
    if len(A) != len(B):
        raise ShapeMismatch(f"fields have {len(A)} and {len(B)} cells")
    dx = grid.dx if isinstance(grid, Grid1D) else float(grid)
    comps = {}
    for name in COMPONENTS:
        diff = np.abs(getattr(A, name) - getattr(B, name))
        comps[name] = (float(diff.max()) if diff.size else 0.0, float(diff.sum() * dx))
    return ErrorReport(
        sup_norm=max(c[0] for c in comps.values()),
        l1_norm=sum(c[1] for c in comps.values()),
        components=comps,
    )


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return float(slope), r2


def _positive_pairs(points: Iterable[Sequence[float]], what: str) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise NonPositiveData(f"need at least 2 ({what}) pairs")
    return pts[:, 0], pts[:, 1]


def fit_loglog_slope(points: Iterable[Sequence[float]]) -> FitResult:
    """Least-squares slope of log(error) against log(epsilon)."""
    eps, err = _positive_pairs(points, "epsilon, error")
    if np.any(eps <= 0) or np.any(err <= 0):
        raise NonPositiveData("log-log fit needs strictly positive data")
    slope, r2 = _linear_fit(np.log(eps), np.log(err))
    return FitResult(slope, r2, eps.size)


def fit_exponential_rate(series: Iterable[Sequence[float]]) -> FitResult:
    """Decay rate k of ``magnitude ~ A exp(-k tau)`` by least squares on the log."""
    tau, mag = _positive_pairs(series, "tau, magnitude")
    if np.any(mag <= 0):
        raise NonPositiveData("exponential fit needs strictly positive magnitudes")
    slope, r2 = _linear_fit(tau, -np.log(mag))
    return FitResult(slope, r2, tau.size)


def locate_steepest_gradient(f: np.ndarray, grid: Grid1D) -> float:
    """Midpoint of the neighbouring cell pair with the largest jump.

    Jumps equal to the maximum within 1e-12 relative count as ties and the
    leftmost one wins.
    """
    f = np.asarray(f, dtype=float)
    if f.size < 3:
        raise TooShort(f"need at least 3 values, got {f.size}")
    jumps = np.abs(np.diff(f))
    top = jumps.max()
    j = int(np.flatnonzero(jumps >= top * (1 - 1e-12))[0])
    x = grid.x
    return 0.5 * (x[j] + x[j + 1])


def ode_matrix(vp: ModelParams) -> np.ndarray:
    """Generator of the spatially uniform system d(u, v, w)/dt = M (u, v, w)."""
    e2 = vp.epsilon**2
    return np.array(
        [
            [-vp.a / e2, vp.b / e2, vp.c1],
            [vp.a / e2, -vp.b / e2, vp.c2],
            [vp.a3, vp.b3, vp.c3],
        ]
    )


def expm_series(A: np.ndarray, terms: int = 30) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series."""
    A = np.asarray(A, dtype=float)
    norm = np.linalg.norm(A, 1)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.25)))) if norm > 0.25 else 0
    B = A / 2.0**squarings
    result = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms + 1):
        term = term @ B / k
        result = result + term
        if np.abs(term).max() < 1e-18 * np.abs(result).max():
            break
    for _ in range(squarings):
        result = result @ result
    return result


def expm_eig(A: np.ndarray) -> np.ndarray:
    """Matrix exponential by eigendecomposition; requires a diagonalizable ``A``."""
    vals, vecs = np.linalg.eig(A)
    out = vecs @ np.diag(np.exp(vals)) @ np.linalg.inv(vecs)
    return np.real_if_close(out, tol=1e6).real


def distinct_eigenvalues(A: np.ndarray, rel_gap: float = 1e-6) -> bool:
    vals = np.linalg.eigvals(A)
    scale = max(1.0, float(np.abs(vals).max()))
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) < rel_gap * scale:
                return False
    return True


def ode_oracle(vp: ModelParams, uvw0: Sequence[float], t: float) -> tuple[float, float, float]:
    """Exact solution of the system with all x-derivatives dropped."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    y0 = np.asarray(uvw0, dtype=float)
    if t == 0:
        return tuple(float(c) for c in y0)
    A = ode_matrix(vp) * t
    y = expm_series(A) @ y0
    if distinct_eigenvalues(A):
        y_eig = expm_eig(A) @ y0
        scale = max(np.abs(y).max(), np.abs(y0).max(), 1e-300)
        if np.abs(y - y_eig).max() > 1e-8 * scale:
            logger.warning("series and eigen matrix exponentials disagree: %s vs %s", y, y_eig)
    return tuple(float(c) for c in y)


def conservation_residual(trace: SolutionTrace, vp: ModelParams, grid: Grid1D) -> float:
    """Worst mismatch in the balance d/dt sum(u + v) = (c1 + c2) sum(w).

    Uses finite differences between consecutive snapshots and the
    trapezoidal mean of ``sum(w)``; normalized by the largest total
    field mass over the trace.
    """
    snaps = trace.snapshots
    if len(snaps) < 2:
        raise InsufficientSnapshots(f"need at least 2 snapshots, got {len(snaps)}")
    dx = grid.dx
    mass = np.array([np.sum(s.u + s.v) * dx for s in snaps])
    wsum = np.array([np.sum(s.w) * dx for s in snaps])
    scale = max(float(np.sum(np.abs(s.u) + np.abs(s.v) + np.abs(s.w)) * dx) for s in snaps)
    if scale == 0.0:
        return 0.0
    times = np.array([s.t for s in snaps])
    worst = 0.0
    for n in range(len(snaps) - 1):
        h = times[n + 1] - times[n]
        if h <= 0:
            continue
        rate = (mass[n + 1] - mass[n]) / h
        expected = (vp.c1 + vp.c2) * 0.5 * (wsum[n] + wsum[n + 1])
        worst = max(worst, abs(rate - expected))
    return worst / scale
