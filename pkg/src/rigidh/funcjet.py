"""Univariate scalar functions from a closed set of analytic families.

Every family evaluates an exact 2-jet (value, first, second derivative);
there is no numerical differentiation in this module. The family set is
closed so that downstream residual checks see formula errors only, never
differentiation noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, NonFinite, PoleEvaluation


@dataclass(frozen=True)
class Jet2:
    """Value and first two derivatives of a scalar quantity at a point."""

    value: float
    d1: float
    d2: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.d1)
                and math.isfinite(self.d2)):
            raise NonFinite(f"non-finite jet: {self}")


class ScalarFunction:
    """Base class: a univariate analytic function with an exact 2-jet."""

    tag: str = ""

    def jet(self, x: float) -> Jet2:
        raise NotImplementedError

    def __call__(self, x: float) -> float:
        return self.jet(x).value

    def spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(ScalarFunction):
    value: float

    tag = "constant"

    def jet(self, x):
        return Jet2(float(self.value), 0.0, 0.0)

    def spec(self):
        return {"type": "constant", "value": self.value}


@dataclass(frozen=True)
class Linear(ScalarFunction):
    k: float
    b: float = 0.0

    tag = "linear"

    def jet(self, x):
        return Jet2(self.k * x + self.b, float(self.k), 0.0)

    def spec(self):
        return {"type": "linear", "k": self.k, "b": self.b}


@dataclass(frozen=True)
class Polynomial(ScalarFunction):
    """Polynomial with coefficients in ascending order of degree."""

    coeffs: tuple

    tag = "polynomial"

    def __init__(self, coeffs: Sequence[float]):
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise ConfigError("polynomial needs a non-empty coefficient list")
        object.__setattr__(self, "coeffs", coeffs)

    def jet(self, x):
        # Horner evaluation of p, p', p'' in one sweep.
        p = pd = pdd = 0.0
        for c in reversed(self.coeffs):
            pdd = pdd * x + 2.0 * pd
            pd = pd * x + p
            p = p * x + c
        return Jet2(p, pd, pdd)

    def spec(self):
        return {"type": "polynomial", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Exponential(ScalarFunction):
    """amplitude * exp(rate * x)."""

    amplitude: float
    rate: float

    tag = "exponential"

    def jet(self, x):
        try:
            e = self.amplitude * math.exp(self.rate * x)
        except OverflowError as exc:
            raise NonFinite(f"exponential overflow at x={x}") from exc
        return Jet2(e, self.rate * e, self.rate * self.rate * e)

    def spec(self):
        return {"type": "exponential", "amplitude": self.amplitude,
                "rate": self.rate}


@dataclass(frozen=True)
class Sine(ScalarFunction):
    """amplitude * sin(frequency * x + phase)."""

    amplitude: float
    frequency: float
    phase: float = 0.0

    tag = "sine"

    def jet(self, x):
        u = self.frequency * x + self.phase
        s = self.amplitude * math.sin(u)
        c = self.amplitude * math.cos(u)
        w = self.frequency
        return Jet2(s, w * c, -w * w * s)

    def spec(self):
        return {"type": "sine", "amplitude": self.amplitude,
                "frequency": self.frequency, "phase": self.phase}


@dataclass(frozen=True)
class ReciprocalShift(ScalarFunction):
    """amplitude / (x - shift); undefined at the pole x = shift."""

    amplitude: float
    shift: float

    tag = "reciprocal_shift"

    _POLE_TOL = 1e-12

    def jet(self, x):
        d = x - self.shift
        if abs(d) <= self._POLE_TOL * max(1.0, abs(x), abs(self.shift)):
            raise PoleEvaluation(f"reciprocal_shift pole at x={x}")
        inv = 1.0 / d
        a = self.amplitude
        return Jet2(a * inv, -a * inv * inv, 2.0 * a * inv * inv * inv)

    def spec(self):
        return {"type": "reciprocal_shift", "amplitude": self.amplitude,
                "shift": self.shift}


def eval_jet2(f: ScalarFunction, x: float) -> Jet2:
    """Exact (f(x), f'(x), f''(x)) for one of the closed function families."""
    if not math.isfinite(x):
        raise NonFinite(f"non-finite evaluation point x={x}")
    return f.jet(x)


_FAMILIES = {
    "constant": (Constant, ("value",), ()),
    "linear": (Linear, ("k",), ("b",)),
    "polynomial": (Polynomial, ("coeffs",), ()),
    "exponential": (Exponential, ("amplitude", "rate"), ()),
    "sine": (Sine, ("amplitude", "frequency"), ("phase",)),
    "reciprocal_shift": (ReciprocalShift, ("amplitude", "shift"), ()),
}


def function_from_spec(rec: dict, where: str = "function") -> ScalarFunction:
    """Build a ScalarFunction from a tagged record like
    {"type": "polynomial", "coeffs": [0, 1]}.

    ``where`` names the config field in error messages.
    """
    if not isinstance(rec, dict):
        raise ConfigError(f"{where}: expected a tagged record, got {rec!r}")
    tag = rec.get("type")
    if tag not in _FAMILIES:
        raise ConfigError(
            f"{where}.type: unknown family {tag!r}; "
            f"expected one of {sorted(_FAMILIES)}")
    cls, required, optional = _FAMILIES[tag]
    kwargs = {}
    for key in required:
        if key not in rec:
            raise ConfigError(f"{where}.{key}: required for family {tag!r}")
        kwargs[key] = rec[key]
    for key in optional:
        if key in rec:
            kwargs[key] = rec[key]
    extra = set(rec) - {"type"} - set(required) - set(optional)
    if extra:
        raise ConfigError(
            f"{where}: unexpected keys {sorted(extra)} for family {tag!r}")
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
