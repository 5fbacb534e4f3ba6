"""Driven two-level systems: spinor, Bloch-vector and classical-chart dynamics,
closed-form pulse solutions and Poincare sections."""

__version__ = "0.1.0"

from .bloch import BlochState, bloch_from_spinor, evolve_bloch, spinor_from_bloch
from .classical import Chart, ChartState, CouplingSplit, ExtendedState, extend_howland, hamilton_flow, poincare_section
from .exact import (
    ConstantFieldSolution,
    SechSolutionParams,
    TanhSolutionParams,
    constant_solution,
    sech_solution,
    tanh_solution,
    transition_probability,
)
from .fields import Constant, FieldConfiguration, Layout, Periodic, QuasiPeriodic, Sech, Tanh
from .quantum import Spinor, evolve_schrodinger

__all__ = [
    "BlochState",
    "Chart",
    "ChartState",
    "Constant",
    "ConstantFieldSolution",
    "CouplingSplit",
    "ExtendedState",
    "FieldConfiguration",
    "Layout",
    "Periodic",
    "QuasiPeriodic",
    "Sech",
    "SechSolutionParams",
    "Spinor",
    "Tanh",
    "TanhSolutionParams",
    "bloch_from_spinor",
    "constant_solution",
    "evolve_bloch",
    "evolve_schrodinger",
    "extend_howland",
    "hamilton_flow",
    "poincare_section",
    "sech_solution",
    "spinor_from_bloch",
    "tanh_solution",
    "transition_probability",
]
