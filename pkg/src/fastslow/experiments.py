"""Experiment drivers shared by the CLI and the acceptance suite."""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import io
from .analysis import (
    ErrorReport,
    FitResult,
    error_norms,
    fit_exponential_rate,
    fit_loglog_slope,
    locate_steepest_gradient,
    ode_oracle,
)
from .asymptotics import main_term, psi_field, reduced_initial_data, solve_reduced
from .config import AnalysisSettings, ExperimentSpec, Mode, format_config
from .errors import ConfigError, WriteFailure
from .initial_data import FieldTriple, Grid1D, InitialCondition, ProfileKind, sample_initial_triple
from .model import ModelParams, derive_constants, ensure_valid
from .solver import Boundary, SolverConfig, plan_dt, solve_full

logger = logging.getLogger(__name__)


def sample(ic: InitialCondition, grid: Grid1D, epsilon: float) -> FieldTriple:
    return sample_initial_triple(ic.u, ic.v, ic.w, grid, epsilon)


def restrict(f: np.ndarray) -> np.ndarray:
    """Average pairs of fine cells onto the coarse cell they tile."""
    return 0.5 * (f[0::2] + f[1::2])


@dataclass
class MainTermError:
    epsilon: float
    n_cells: int
    sup_err: float
    l1_err: float
    self_err: float
    resolved: bool
    report: ErrorReport


def _error_field(vp, grid, ic, config) -> tuple[FieldTriple, FieldTriple]:
    x0 = sample(ic, grid, vp.epsilon)
    full = solve_full(vp, grid, x0, config).snapshots[-1]
    approx = main_term(x0, vp, grid, config)[-1]
    return full, approx


def measure_main_term_error(
    vp: ModelParams,
    grid: Grid1D,
    ic: InitialCondition,
    config: SolverConfig,
    richardson_tol: float = 0.1,
    max_refinements: int = 3,
) -> MainTermError:
    """Sup/L1 error of the main term against the full solver at the last output time.

    The solver self-error is the change of the u error field between the
    grid and its 2x refinement.  The grid is doubled until the self-error is
    below ``richardson_tol`` times the measured error, or
    ``max_refinements`` doublings have been spent; the finer level's
    numbers are reported.
    """
    vp = ensure_valid(vp)
    config = replace(config, output_times=(config.output_times[-1],))
    coarse = _error_field(vp, grid, ic, config)
    for level in range(max_refinements + 1):
        fine_grid = grid.refined(2)
        fine = _error_field(vp, fine_grid, ic, config)
        e_coarse = coarse[0].u - coarse[1].u
        e_fine = fine[0].u - fine[1].u
        self_err = float(np.max(np.abs(e_coarse - restrict(e_fine))))
        report = error_norms(fine[0], fine[1], fine_grid)
        sup_err = report.sup("u")
        resolved = self_err < richardson_tol * sup_err
        logger.info(
            "eps=%g n=%d sup_err=%.4e self_err=%.4e resolved=%s",
            vp.epsilon, fine_grid.n_cells, sup_err, self_err, resolved,
        )
        if resolved or level == max_refinements:
            break
        grid, coarse = fine_grid, fine
    return MainTermError(vp.epsilon, fine_grid.n_cells, sup_err, report.l1("u"), self_err, resolved, report)


def layer_decay(
    vp: ModelParams,
    grid: Grid1D,
    ic: InitialCondition,
    settings: AnalysisSettings = AnalysisSettings(),
    cfl: float = 0.9,
    boundary: Boundary = Boundary.OUTFLOW,
) -> tuple[FitResult, np.ndarray, np.ndarray, int]:
    """Fit the decay rate of |u_full - u0| in the stretched time at the cell of largest |psi|.

    Returns the fit, the tau samples, the magnitudes and the cell index.
    """
    vp = ensure_valid(vp)
    x0 = sample(ic, grid, vp.epsilon)
    taus = np.linspace(settings.decay_tau_min, settings.decay_tau_max, settings.decay_samples)
    times = tuple(float(t) for t in taus * vp.epsilon**2)
    config = SolverConfig(cfl=cfl, output_times=times, boundary=boundary)
    full = solve_full(vp, grid, x0, config)
    reduced = solve_reduced(vp, grid, reduced_initial_data(x0, vp), config)
    j = int(np.argmax(np.abs(psi_field(x0, vp).psi)))
    mags = np.array([abs(f.u[j] - r.ubar0[j]) for f, r in zip(full.snapshots, reduced)])
    fit = fit_exponential_rate(list(zip(taus, mags)))
    return fit, taus, mags, j


def layer_location(vp: ModelParams, grid: Grid1D, ic: InitialCondition, t: float, cfl: float = 0.9) -> tuple[float, float]:
    """Steepest-gradient position of the full-solver u at ``t`` and the pseudo-characteristic prediction."""
    vp = ensure_valid(vp)
    if ic.u.kind is not ProfileKind.STEP:
        raise ConfigError("layer location needs a step profile for u")
    x0 = sample(ic, grid, vp.epsilon)
    snap = solve_full(vp, grid, x0, SolverConfig(cfl=cfl, output_times=(t,))).snapshots[-1]
    return locate_steepest_gradient(snap.u, grid), ic.u.jump + derive_constants(vp).V * t


@dataclass
class OracleComparison:
    t: float
    full: tuple[float, float, float]
    exact: tuple[float, float, float]
    rel_err: float
    dt: float
    halvings: int


def oracle_comparison(
    vp: ModelParams,
    grid: Grid1D,
    uvw0: tuple[float, float, float],
    t: float,
    cfl: float = 0.9,
    rtol: float = 1e-8,
    max_halvings: int = 16,
) -> OracleComparison:
    """Compare the full solver on uniform data against the matrix-exponential oracle.

    ``dt`` is halved until two successive runs agree to ``rtol`` (relative
    to the largest component); the oracle is not consulted for stopping.
    """
    vp = ensure_valid(vp)
    x0 = FieldTriple(*(np.full(grid.n_cells, c, dtype=float) for c in uvw0), 0.0)
    exact = np.array(ode_oracle(vp, uvw0, t))
    dt = plan_dt(vp, grid, SolverConfig(cfl=cfl, output_times=(t,)))
    prev = None
    for halvings in range(max_halvings + 1):
        config = SolverConfig(cfl=cfl, output_times=(t,), boundary=Boundary.PERIODIC, dt_max=dt)
        snap = solve_full(vp, grid, x0, config).snapshots[-1]
        got = np.array([snap.u.mean(), snap.v.mean(), snap.w.mean()])
        if prev is not None and np.max(np.abs(got - prev)) <= rtol * max(np.abs(got).max(), 1e-300):
            break
        prev = got
        dt /= 2
    rel = float(np.max(np.abs(got - exact)) / max(np.abs(exact).max(), 1e-300))
    return OracleComparison(t, tuple(got), tuple(exact), rel, dt, halvings)


# ---------------------------------------------------------------- run modes


@dataclass
class RunArtifacts:
    files: list[Path]
    manifest: dict


def _fields_name(prefix: str, index: int) -> str:
    return f"{prefix}_{index:03d}.csv"


def _run_solve(spec: ExperimentSpec, out: Path, manifest: dict) -> list[Path]:
    x0 = sample(spec.ic, spec.grid, spec.params.epsilon)
    trace = solve_full(spec.params, spec.grid, x0, spec.solver)
    manifest.update(dt=trace.dt, steps=trace.steps)
    return [
        io.write_fields_csv(s, spec.grid, out / _fields_name("full", i)) for i, s in enumerate(trace.snapshots)
    ]


def _run_expand(spec: ExperimentSpec, out: Path, manifest: dict) -> list[Path]:
    x0 = sample(spec.ic, spec.grid, spec.params.epsilon)
    terms = main_term(x0, spec.params, spec.grid, spec.solver)
    return [io.write_fields_csv(s, spec.grid, out / _fields_name("expansion", i)) for i, s in enumerate(terms)]


def _compare_rows(spec: ExperimentSpec, full: FieldTriple, approx: FieldTriple, grid: Grid1D) -> list:
    report = error_norms(full, approx, grid)
    rows = []
    for comp, (sup, l1) in report.components.items():
        rows.append(("sup_err", comp, sup))
        rows.append(("l1_err", comp, l1))
    rows.append(("sup_err", "all", report.sup_norm))
    rows.append(("l1_err", "all", report.l1_norm))
    vp = spec.params
    fit, _, _, _ = layer_decay(vp, spec.grid, spec.ic, spec.analysis, spec.solver.cfl, spec.solver.boundary)
    rows.append(("decay_rate", "u", fit.value))
    rows.append(("decay_target", "u", vp.a + vp.b))
    rows.append(("r_squared", "decay", fit.r_squared))
    if spec.ic.u.kind is ProfileKind.STEP and full.t > 0:
        rows.append(("layer_x", "u", locate_steepest_gradient(full.u, grid)))
        rows.append(("layer_x_predicted", "u", spec.ic.u.jump + derive_constants(vp).V * full.t))
    return rows


def _run_compare(spec: ExperimentSpec, out: Path, manifest: dict) -> list[Path]:
    vp, grid = spec.params, spec.grid
    x0 = sample(spec.ic, grid, vp.epsilon)
    trace = solve_full(vp, grid, x0, spec.solver)
    terms = main_term(x0, vp, grid, spec.solver)
    manifest.update(dt=trace.dt, steps=trace.steps)
    files = []
    for i, (f, m) in enumerate(zip(trace.snapshots, terms)):
        files.append(io.write_fields_csv(f, grid, out / _fields_name("full", i)))
        files.append(io.write_fields_csv(m, grid, out / _fields_name("expansion", i)))
    rows = _compare_rows(spec, trace.snapshots[-1], terms[-1], grid)
    files.append(io.write_report_csv(rows, out / "report.csv"))
    return files


def _run_sweep(spec: ExperimentSpec, out: Path, manifest: dict) -> list[Path]:
    files = []
    summary = []
    points = []
    settings = spec.analysis
    for i, eps in enumerate(spec.sweep_epsilons):
        vp = spec.params.replace(epsilon=eps)
        m = measure_main_term_error(
            vp, spec.grid, spec.ic, spec.solver, settings.richardson_tol, settings.max_refinements
        )
        rows = [(name, comp, val) for comp, (s, l) in m.report.components.items() for name, val in (("sup_err", s), ("l1_err", l))]
        rows.append(("self_err", "u", m.self_err))
        rows.append(("n_cells", "grid", m.n_cells))
        files.append(io.write_report_csv(rows, out / f"eps_{i:02d}" / "report.csv"))
        summary.append((eps, m.n_cells, m.sup_err, m.l1_err, m.self_err, "yes" if m.resolved else "no"))
        points.append((eps, m.sup_err))
    files.append(
        io.write_table_csv(
            ("epsilon", "n_cells", "sup_err_u", "l1_err_u", "self_err_u", "resolved"), summary, out / "summary.csv"
        )
    )
    fit = fit_loglog_slope(points)
    manifest["slope"] = fit.value
    files.append(io.write_report_csv([("slope", "u", fit.value), ("r_squared", "u", fit.r_squared)], out / "report.csv"))
    return files


def _run_oracle(spec: ExperimentSpec, out: Path, manifest: dict) -> list[Path]:
    if spec.solver.boundary is not Boundary.PERIODIC:
        raise ConfigError("oracle mode needs boundary = periodic")
    x0 = sample(spec.ic, spec.grid, spec.params.epsilon)
    uvw0 = []
    for name, arr in x0.components().items():
        if not np.all(arr == arr[0]):
            raise ConfigError(f"oracle mode needs spatially uniform initial data ({name} varies)")
        uvw0.append(float(arr[0]))
    table = []
    rows = []
    for t in spec.solver.output_times:
        cmp_ = oracle_comparison(spec.params, spec.grid, tuple(uvw0), t, spec.solver.cfl)
        table.append((t, *cmp_.full, *cmp_.exact, cmp_.rel_err, cmp_.dt))
        rows.append(("rel_err", f"t={t!r}", cmp_.rel_err))
    files = [
        io.write_table_csv(
            ("t", "u_full", "v_full", "w_full", "u_exact", "v_exact", "w_exact", "rel_err", "dt"),
            table,
            out / "oracle.csv",
        ),
        io.write_report_csv(rows, out / "report.csv"),
    ]
    return files


_MODES = {
    Mode.SOLVE: _run_solve,
    Mode.EXPAND: _run_expand,
    Mode.COMPARE: _run_compare,
    Mode.SWEEP: _run_sweep,
    Mode.ORACLE: _run_oracle,
}


def run_experiment(spec: ExperimentSpec, output_dir: str | Path | None = None) -> RunArtifacts:
    out = Path(output_dir if output_dir is not None else spec.output_dir)
    consts = derive_constants(spec.params)
    manifest: dict = {"mode": spec.mode.value, "derived": {"V": consts.V, "C": consts.Ccap, "c": consts.clow, "D": consts.D}}
    started = time.perf_counter()
    files = _MODES[spec.mode](spec, out, manifest)
    manifest["wall_time_s"] = time.perf_counter() - started
    echo = out / "config.echo"
    try:
        echo.write_text(format_config(spec), encoding="utf-8")
        manifest["config"] = format_config(spec)
        manifest["files"] = [str(p) for p in files] + [str(echo)]
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise WriteFailure(f"cannot write manifest in {out}: {exc}") from exc
    files += [echo, out / "manifest.json"]
    return RunArtifacts(files=files, manifest=manifest)
