"""Initial profiles, the uniform grid and the (u, v, w) field container."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadGrid, BadProfile, DomainTooSmall, ShapeMismatch

TAIL_TOLERANCE = 1e-12


class ProfileKind(str, Enum):
    GAUSSIAN = "gaussian"
    COMPACT_BUMP = "compact_bump"
    STEP = "step"
    SPIKE = "spike"
    CONSTANT = "constant"


@dataclass(frozen=True)
class ProfileSpec:
    """One initial profile.

    ``amplitude``, ``center`` and ``width`` parametrize the smooth kinds;
    ``jump``, ``left`` and ``right`` the step; ``constant`` uses
    ``amplitude`` only.  A spike evaluates ``base`` at ``x / epsilon``.
    """

    kind: ProfileKind = ProfileKind.GAUSSIAN
    amplitude: float = 1.0
    center: float = 0.0
    width: float = 1.0
    jump: float = 0.0
    left: float = 0.0
    right: float = 1.0
    base: ProfileSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if self.kind in (ProfileKind.GAUSSIAN, ProfileKind.COMPACT_BUMP):
            if not self.width > 0:
                raise BadProfile(f"width must be positive, got {self.width}")
        if self.kind is ProfileKind.SPIKE:
            if self.base is None:
                raise BadProfile("spike profile needs a base profile")
            if self.base.kind not in (ProfileKind.GAUSSIAN, ProfileKind.COMPACT_BUMP):
                raise BadProfile("spike base must be gaussian or compact_bump")

    @property
    def decaying(self) -> bool:
        return self.kind in (ProfileKind.GAUSSIAN, ProfileKind.COMPACT_BUMP, ProfileKind.SPIKE)

    @property
    def peak(self) -> float:
        if self.kind is ProfileKind.SPIKE:
            return self.base.peak
        if self.kind is ProfileKind.STEP:
            return max(abs(self.left), abs(self.right))
        return abs(self.amplitude)


def gaussian(amplitude: float, center: float, width: float) -> ProfileSpec:
    return ProfileSpec(ProfileKind.GAUSSIAN, amplitude=amplitude, center=center, width=width)


def step(jump: float, left: float, right: float) -> ProfileSpec:
    return ProfileSpec(ProfileKind.STEP, jump=jump, left=left, right=right)


def spike(base: ProfileSpec) -> ProfileSpec:
    return ProfileSpec(ProfileKind.SPIKE, base=base)


def constant(value: float) -> ProfileSpec:
    return ProfileSpec(ProfileKind.CONSTANT, amplitude=value)


def eval_profile(spec: ProfileSpec, x, epsilon: float | None = None):
    """Evaluate ``spec`` at ``x`` (scalar or array).

    The step takes its right value at the jump itself.
    """
    kind = spec.kind
    xa = np.asarray(x, dtype=float)
    if kind is ProfileKind.GAUSSIAN:
        if not spec.width > 0:
            raise BadProfile(f"width must be positive, got {spec.width}")
        out = spec.amplitude * np.exp(-(((xa - spec.center) / spec.width) ** 2))
    elif kind is ProfileKind.COMPACT_BUMP:
        if not spec.width > 0:
            raise BadProfile(f"width must be positive, got {spec.width}")
        r2 = ((xa - spec.center) / spec.width) ** 2
        inside = r2 < 1.0
        safe = np.where(inside, r2, 0.0)
        out = np.where(inside, spec.amplitude * np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0)
    elif kind is ProfileKind.STEP:
        out = np.where(xa >= spec.jump, spec.right, spec.left).astype(float)
    elif kind is ProfileKind.SPIKE:
        if epsilon is None:
            raise BadProfile("spike profiles need epsilon")
        out = eval_profile(spec.base, xa / epsilon)
    elif kind is ProfileKind.CONSTANT:
        out = np.full(xa.shape, float(spec.amplitude))
    else:  # pragma: no cover
        raise BadProfile(f"unknown profile kind {kind!r}")
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_min >= self.x_max:
            raise BadGrid(f"need finite x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise BadGrid(f"n_cells must be an integer >= 2, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def refined(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.x_min, self.x_max, self.n_cells * factor)


@dataclass
class FieldTriple:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if not (self.u.ndim == 1 and self.u.shape == self.v.shape == self.w.shape):
            raise ShapeMismatch(
                f"u, v, w must be 1-D arrays of equal length, got {self.u.shape}, {self.v.shape}, {self.w.shape}"
            )
        self.t = float(self.t)

    def __len__(self) -> int:
        return self.u.size

    def components(self) -> dict[str, np.ndarray]:
        return {"u": self.u, "v": self.v, "w": self.w}

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.u).all() and np.isfinite(self.v).all() and np.isfinite(self.w).all())

    def copy(self) -> "FieldTriple":
        return FieldTriple(self.u.copy(), self.v.copy(), self.w.copy(), self.t)


@dataclass(frozen=True)
class InitialCondition:
    u: ProfileSpec = field(default_factory=ProfileSpec)
    v: ProfileSpec = field(default_factory=ProfileSpec)
    w: ProfileSpec = field(default_factory=ProfileSpec)


def check_domain(spec: ProfileSpec, grid: Grid1D, epsilon: float | None = None, name: str = "profile") -> None:
    """Raise :class:`DomainTooSmall` if a decaying profile is not negligible at the grid edges."""
    if not spec.decaying or spec.peak == 0.0:
        return
    edges = eval_profile(spec, np.array([grid.x_min, grid.x_max]), epsilon)
    tail = float(np.max(np.abs(edges)))
    if tail > TAIL_TOLERANCE * spec.peak:
        raise DomainTooSmall(
            f"{name}: edge value {tail:.3e} exceeds {TAIL_TOLERANCE:g} of peak {spec.peak:.3e}; widen the grid"
        )


def sample_initial_triple(
    u_spec: ProfileSpec, v_spec: ProfileSpec, w_spec: ProfileSpec, grid: Grid1D, epsilon: float
) -> FieldTriple:
    x = grid.x
    for name, spec in (("u", u_spec), ("v", v_spec), ("w", w_spec)):
        check_domain(spec, grid, epsilon, name)
    return FieldTriple(
        eval_profile(u_spec, x, epsilon),
        eval_profile(v_spec, x, epsilon),
        eval_profile(w_spec, x, epsilon),
        0.0,
    )
