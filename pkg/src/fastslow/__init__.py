"""Stiff fast/slow transport system: brute-force solver and zeroth-order asymptotics."""

from .analysis import error_norms, fit_exponential_rate, fit_loglog_slope, locate_steepest_gradient, ode_oracle
from .asymptotics import (
    assemble_main_term,
    boundary_layer_triple,
    main_term,
    psi_field,
    reduced_initial_data,
    regular_triple,
    solve_reduced,
)
from .config import ExperimentSpec, parse_config
from .experiments import run_experiment
from .initial_data import FieldTriple, Grid1D, InitialCondition, ProfileSpec, eval_profile, sample_initial_triple
from .model import DerivedConstants, ModelParams, derive_constants, validate
from .solver import SolverConfig, solve_full, stable_dt

__all__ = [
    "DerivedConstants",
    "ExperimentSpec",
    "FieldTriple",
    "Grid1D",
    "InitialCondition",
    "ModelParams",
    "ProfileSpec",
    "SolverConfig",
    "assemble_main_term",
    "boundary_layer_triple",
    "derive_constants",
    "error_norms",
    "eval_profile",
    "fit_exponential_rate",
    "fit_loglog_slope",
    "locate_steepest_gradient",
    "main_term",
    "ode_oracle",
    "parse_config",
    "psi_field",
    "reduced_initial_data",
    "regular_triple",
    "run_experiment",
    "sample_initial_triple",
    "solve_full",
    "solve_reduced",
    "stable_dt",
    "validate",
]
