"""Coefficients of the fast/slow transport system and its derived constants.

The system being modelled is::

    eps^2 (u_t + k1 u_x) = -a u + b v + eps^2 c1 w
    eps^2 (v_t + k2 v_x) =  a u - b v + eps^2 c2 w
          w_t + k3 w_x   = a3 u + b3 v + c3 w
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .errors import BadEpsilon, BadHorizon, NonFinite, NonPositiveRelaxation

MODEL_KEYS = ("k1", "k2", "k3", "a", "b", "c1", "c2", "a3", "b3", "c3", "epsilon", "T")


@dataclass(frozen=True)
class ModelParams:
    k1: float
    k2: float
    k3: float
    a: float
    b: float
    c1: float
    c2: float
    a3: float
    b3: float
    c3: float
    epsilon: float
    T: float

    def replace(self, **changes) -> "ModelParams":
        data = asdict(self)
        data.update(changes)
        return type(self)(**data)


@dataclass(frozen=True)
class ValidatedParams(ModelParams):
    """A :class:`ModelParams` whose invariants have been checked.

    Only :func:`validate` should construct these.
    """

    def replace(self, **changes) -> "ValidatedParams":
        return validate(ModelParams(**{**asdict(self), **changes}))


@dataclass(frozen=True)
class DerivedConstants:
    V: float
    Ccap: float
    clow: float
    D: float


def validate(params: ModelParams) -> ValidatedParams:
    for f in fields(ModelParams):
        value = getattr(params, f.name)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise NonFinite(f"{f.name} must be a finite real, got {value!r}")
    if params.a <= 0 or params.b <= 0:
        raise NonPositiveRelaxation(f"a and b must be positive (a={params.a}, b={params.b})")
    if not 0.0 < params.epsilon < 1.0:
        raise BadEpsilon(f"epsilon must lie in (0, 1), got {params.epsilon}")
    if params.T <= 0:
        raise BadHorizon(f"T must be positive, got {params.T}")
    return ValidatedParams(**{k: float(v) for k, v in asdict(params).items()})


def ensure_valid(params: ModelParams) -> ValidatedParams:
    if isinstance(params, ValidatedParams):
        return params
    return validate(params)


def derive_constants(vp: ModelParams) -> DerivedConstants:
    """Effective speed and couplings of the reduced (slow-manifold) system."""
    vp = ensure_valid(vp)
    a, b = vp.a, vp.b
    if vp.k1 == vp.k2:
        V = vp.k1
    else:
        V = (b * vp.k1 + a * vp.k2) / (a + b)
        # a convex combination can round onto an endpoint for extreme a/b
        lo, hi = min(vp.k1, vp.k2), max(vp.k1, vp.k2)
        V = min(max(V, lo), hi)
    Ccap = b * (vp.c1 + vp.c2) / (a + b)
    clow = (vp.a3 * b + a * vp.b3) / b
    return DerivedConstants(V=V, Ccap=Ccap, clow=clow, D=Ccap * clow)
