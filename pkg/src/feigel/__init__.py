"""Vacuum-fluctuation momentum in a magnetoelectric cavity.

Submodules
----------
material
    Medium parameters and constitutive relations.
greens
    Cavity Green functions and their first-order expansions.
modes
    Single TE mode observables.
emt
    Stress tensors, momentum densities and conservation residuals.
vacuum
    The vacuum momentum integral and its analytic oracles.
cli
    Batch front end (``feigel run``).
"""
from ._core import BACKEND
from .errors import ConfigInvalid, DegeneratePoint, StepTooLarge, ToleranceNotMet
from .material import FieldState, MaterialParams
from .vacuum import QuadratureConfig, VacuumMomentumResult, closed_form, vacuum_momentum

__all__ = [
    "BACKEND",
    "ConfigInvalid",
    "DegeneratePoint",
    "FieldState",
    "MaterialParams",
    "QuadratureConfig",
    "StepTooLarge",
    "ToleranceNotMet",
    "VacuumMomentumResult",
    "closed_form",
    "vacuum_momentum",
]
