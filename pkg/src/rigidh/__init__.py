"""Verification toolkit for six-dimensional [2211]-type rigid h-space
metrics: exact-jet metric construction, tensor calculus, residual checks of
the defining equations, and geodesic first-integral monitoring."""

from .funcjet import (Constant, Exponential, Jet2, Linear, Polynomial,
                      ReciprocalShift, ScalarFunction, Sine, eval_jet2,
                      function_from_spec)
from .hspace2211 import (HSpaceMetric, HSpaceParams, RootsAt, h_tensor_at,
                         metric_at, metric_jets_at, phi_gradient_at, roots_at)

__version__ = "0.1.0"

__all__ = [
    "Constant", "Exponential", "Jet2", "Linear", "Polynomial",
    "ReciprocalShift", "ScalarFunction", "Sine", "eval_jet2",
    "function_from_spec",
    "HSpaceMetric", "HSpaceParams", "RootsAt", "h_tensor_at", "metric_at",
    "metric_jets_at", "phi_gradient_at", "roots_at",
]
