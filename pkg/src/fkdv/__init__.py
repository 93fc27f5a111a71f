"""Pseudospectral laboratory for the generalized fractional KdV equation

    u_t - d_1 D^a u + sum_j nu_j u^{k_j - 1} d_1 u = 0

on a periodic box in one or two dimensions, with weighted-norm, moment and
solitary-wave diagnostics.
"""

import logging

from .diagnostics import (DiagnosticRecord, MomentSpec, TailFit, conservation, decay_gain,
                          make_record, moment, momentum_residual, regularity_thresholds,
                          sobolev_norm, stein_derivative, stein_norm, symbol_stein_check,
                          tail_exponent_fit, weighted_l2_norm)
from .groundstate import (GroundStateResult, petviashvili_solve, rescale_ground_state,
                          verify_decay)
from .propagator import (BlowUpError, ModelParams, Stepper, StepperConfig, Trajectory,
                         apply_group, etd_coefficients, evolve, nonlinear_term, step)
from .scenarios import ScenarioConfig, ScenarioReport, run_scenario
from .spectral import (Field, Grid, MultiplierSpec, apply_multiplier, forward, inverse,
                       make_grid, oracle_dft)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "DiagnosticRecord", "Field", "Grid", "GroundStateResult", "ModelParams",
    "MomentSpec", "MultiplierSpec", "ScenarioConfig", "ScenarioReport", "Stepper",
    "StepperConfig", "TailFit", "Trajectory", "apply_group", "apply_multiplier",
    "conservation", "decay_gain", "etd_coefficients", "evolve", "forward", "inverse",
    "make_grid", "make_record", "moment", "momentum_residual", "nonlinear_term", "oracle_dft",
    "petviashvili_solve", "regularity_thresholds", "rescale_ground_state", "run_scenario",
    "sobolev_norm", "step", "stein_derivative", "stein_norm", "symbol_stein_check",
    "tail_exponent_fit", "verify_decay", "weighted_l2_norm",
]
