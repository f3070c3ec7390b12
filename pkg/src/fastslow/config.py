"""Flat ``key = value`` experiment files.

Every model coefficient is a literal key (k1, k2, k3, a, b, c1, c2, a3, b3,
c3, epsilon, T).  Profiles use ``<comp>_<field>`` keys, e.g. ``u_kind``,
``u_amplitude``, ``w_jump``.  Lists are comma separated.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from enum import Enum

from .errors import (
    BadEpsilon,
    BadHorizon,
    ConfigError,
    MissingKey,
    NonFinite,
    NonPositiveRelaxation,
    ParseError,
    UnknownKey,
    ValidationError,
)
from .initial_data import Grid1D, InitialCondition, ProfileKind, ProfileSpec
from .model import MODEL_KEYS, ModelParams, ValidatedParams, validate
from .solver import Boundary, SolverConfig


class Mode(str, Enum):
    SOLVE = "solve"
    EXPAND = "expand"
    COMPARE = "compare"
    SWEEP = "sweep"
    ORACLE = "oracle"


PROFILE_FIELDS = ("kind", "amplitude", "center", "width", "jump", "left", "right", "base")
GRID_KEYS = ("x_min", "x_max", "n_cells")
COMPONENT_NAMES = ("u", "v", "w")


@dataclass(frozen=True)
class AnalysisSettings:
    decay_tau_min: float = 0.5
    decay_tau_max: float = 4.0
    decay_samples: int = 15
    richardson_tol: float = 0.1
    max_refinements: int = 3


@dataclass(frozen=True)
class ExperimentSpec:
    params: ValidatedParams
    grid: Grid1D
    ic: InitialCondition
    solver: SolverConfig
    mode: Mode
    sweep_epsilons: tuple[float, ...] = ()
    output_dir: str = "out"
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)


_OPTIONAL_DEFAULTS = {
    "cfl": "0.9",
    "boundary": "outflow",
    "output_dir": "out",
}

_ANALYSIS_KEYS = tuple(f.name for f in fields(AnalysisSettings))
_PROFILE_KEYS = tuple(f"{c}_{f}" for c in COMPONENT_NAMES for f in PROFILE_FIELDS)
KNOWN_KEYS = frozenset(
    MODEL_KEYS
    + GRID_KEYS
    + _PROFILE_KEYS
    + _ANALYSIS_KEYS
    + ("mode", "cfl", "boundary", "output_times", "dt_max", "sweep_epsilons", "output_dir")
)

# which config keys a model validation error refers to
_ERROR_KEYS = {
    NonPositiveRelaxation: ("a", "b"),
    BadEpsilon: ("epsilon",),
    BadHorizon: ("T",),
}


def _tokenize(text: str) -> tuple[dict[str, str], dict[str, int]]:
    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", lineno)
        if key not in KNOWN_KEYS:
            raise UnknownKey(key, lineno)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno)
        values[key] = value
        lines[key] = lineno
    return values, lines


class _Reader:
    def __init__(self, values: dict[str, str], lines: dict[str, int]):
        self.values = values
        self.lines = lines

    def has(self, key: str) -> bool:
        return key in self.values

    def raw(self, key: str, default: str | None = None) -> str:
        if key in self.values:
            return self.values[key]
        if default is None:
            raise MissingKey(key)
        return default

    def real(self, key: str, default: str | None = None) -> float:
        text = self.raw(key, default)
        try:
            return float(text)
        except ValueError:
            raise ParseError(f"{key}: not a number: {text!r}", self.lines.get(key, 0)) from None

    def integer(self, key: str, default: str | None = None) -> int:
        text = self.raw(key, default)
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"{key}: not an integer: {text!r}", self.lines.get(key, 0)) from None

    def reals(self, key: str, default: str | None = None) -> tuple[float, ...]:
        text = self.raw(key, default)
        try:
            return tuple(float(s) for s in text.split(",") if s.strip())
        except ValueError:
            raise ParseError(f"{key}: not a list of numbers: {text!r}", self.lines.get(key, 0)) from None

    def where(self, *keys: str) -> str:
        found = [f"{k} (line {self.lines[k]})" for k in keys if k in self.lines]
        return "; ".join(found)


def _parse_profile(r: _Reader, comp: str) -> ProfileSpec:
    kind_text = r.raw(f"{comp}_kind")
    try:
        kind = ProfileKind(kind_text)
    except ValueError:
        raise ParseError(f"{comp}_kind: unknown profile kind {kind_text!r}", r.lines[f"{comp}_kind"]) from None
    amplitude = r.real(f"{comp}_amplitude", "1")
    center = r.real(f"{comp}_center", "0")
    width = r.real(f"{comp}_width", "1")
    if kind is ProfileKind.SPIKE:
        base = ProfileSpec(r.raw(f"{comp}_base", "gaussian"), amplitude=amplitude, center=center, width=width)
        return ProfileSpec(kind, base=base)
    return ProfileSpec(
        kind,
        amplitude=amplitude,
        center=center,
        width=width,
        jump=r.real(f"{comp}_jump", "0"),
        left=r.real(f"{comp}_left", "0"),
        right=r.real(f"{comp}_right", "1"),
    )


def _with_context(exc: ValidationError, r: _Reader, keys: tuple[str, ...]) -> ValidationError:
    where = r.where(*keys)
    if not where:
        return exc
    new = type(exc)(f"{exc} [{where}]")
    return new


def parse_config(text: str, mode: Mode | str | None = None) -> ExperimentSpec:
    """Parse an experiment file; ``mode`` (the CLI subcommand) overrides the ``mode`` key."""
    values, lines = _tokenize(text)
    if mode is not None:
        values["mode"] = Mode(mode).value
    r = _Reader(values, lines)

    model = {key: r.real(key) for key in MODEL_KEYS}
    try:
        params = validate(ModelParams(**model))
    except ValidationError as exc:
        keys = _ERROR_KEYS.get(type(exc), MODEL_KEYS if isinstance(exc, NonFinite) else ())
        raise _with_context(exc, r, keys) from exc

    try:
        mode = Mode(r.raw("mode"))
    except ValueError:
        raise ParseError(f"mode: unknown mode {values['mode']!r}", lines.get("mode", 0)) from None

    try:
        grid = Grid1D(r.real("x_min"), r.real("x_max"), r.integer("n_cells"))
        ic = InitialCondition(*(_parse_profile(r, c) for c in COMPONENT_NAMES))
        output_times = r.reals("output_times", repr(params.T))
        solver = SolverConfig(
            cfl=r.real("cfl", _OPTIONAL_DEFAULTS["cfl"]),
            output_times=output_times,
            boundary=Boundary(r.raw("boundary", _OPTIONAL_DEFAULTS["boundary"])),
            dt_max=r.real("dt_max") if r.has("dt_max") else None,
        )
        solver.check_horizon(params.T)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ConfigError(str(exc)) from exc

    sweep: tuple[float, ...] = ()
    if mode is Mode.SWEEP:
        sweep = r.reals("sweep_epsilons")
        if len(sweep) < 2:
            raise ConfigError("sweep_epsilons needs at least two values")
        if any(not 0 < e < 1 for e in sweep):
            raise ConfigError(f"sweep_epsilons must lie in (0, 1), got {sweep}")
        if any(e1 >= e0 for e0, e1 in zip(sweep, sweep[1:])):
            raise ConfigError(f"sweep_epsilons must be strictly decreasing, got {sweep}")
    elif r.has("sweep_epsilons"):
        sweep = r.reals("sweep_epsilons")

    defaults = AnalysisSettings()
    analysis = AnalysisSettings(
        decay_tau_min=r.real("decay_tau_min", repr(defaults.decay_tau_min)),
        decay_tau_max=r.real("decay_tau_max", repr(defaults.decay_tau_max)),
        decay_samples=r.integer("decay_samples", str(defaults.decay_samples)),
        richardson_tol=r.real("richardson_tol", repr(defaults.richardson_tol)),
        max_refinements=r.integer("max_refinements", str(defaults.max_refinements)),
    )
    if not 0 < analysis.decay_tau_min < analysis.decay_tau_max or analysis.decay_samples < 2:
        raise ConfigError("decay window needs 0 < decay_tau_min < decay_tau_max and decay_samples >= 2")

    return ExperimentSpec(
        params=params,
        grid=grid,
        ic=ic,
        solver=solver,
        mode=mode,
        sweep_epsilons=sweep,
        output_dir=r.raw("output_dir", _OPTIONAL_DEFAULTS["output_dir"]),
        analysis=analysis,
    )


def load_config(path, mode: Mode | str | None = None) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), mode)


def _num(v: float) -> str:
    return repr(float(v))


def format_config(spec: ExperimentSpec) -> str:
    """Render ``spec`` back to the flat format; ``parse_config`` inverts it."""
    out = [f"mode = {spec.mode.value}"]
    p = asdict(spec.params)
    out += [f"{k} = {_num(p[k])}" for k in MODEL_KEYS]
    g = spec.grid
    out += [f"x_min = {_num(g.x_min)}", f"x_max = {_num(g.x_max)}", f"n_cells = {g.n_cells}"]
    for comp in COMPONENT_NAMES:
        prof: ProfileSpec = getattr(spec.ic, comp)
        out.append(f"{comp}_kind = {prof.kind.value}")
        if prof.kind is ProfileKind.SPIKE:
            out.append(f"{comp}_base = {prof.base.kind.value}")
            prof = prof.base
        out += [
            f"{comp}_amplitude = {_num(prof.amplitude)}",
            f"{comp}_center = {_num(prof.center)}",
            f"{comp}_width = {_num(prof.width)}",
        ]
        if prof.kind is ProfileKind.STEP:
            out += [
                f"{comp}_jump = {_num(prof.jump)}",
                f"{comp}_left = {_num(prof.left)}",
                f"{comp}_right = {_num(prof.right)}",
            ]
    s = spec.solver
    out += [
        f"cfl = {_num(s.cfl)}",
        f"boundary = {s.boundary.value}",
        "output_times = " + ", ".join(_num(t) for t in s.output_times),
    ]
    if s.dt_max is not None:
        out.append(f"dt_max = {_num(s.dt_max)}")
    if spec.sweep_epsilons:
        out.append("sweep_epsilons = " + ", ".join(_num(e) for e in spec.sweep_epsilons))
    out.append(f"output_dir = {spec.output_dir}")
    a = spec.analysis
    out += [
        f"decay_tau_min = {_num(a.decay_tau_min)}",
        f"decay_tau_max = {_num(a.decay_tau_max)}",
        f"decay_samples = {a.decay_samples}",
        f"richardson_tol = {_num(a.richardson_tol)}",
        f"max_refinements = {a.max_refinements}",
    ]
    return "\n".join(out) + "\n"
