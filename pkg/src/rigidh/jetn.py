"""Second-order forward-mode jets in several variables.

A JetN carries a value, a gradient and a Hessian with respect to the n
coordinates of a point. Propagating these through the component formulas of
the metric family yields exact first and second coordinate partials, which
is what the curvature and residual checks downstream consume.
"""
from __future__ import annotations

import numpy as np

from .funcjet import Jet2


class Jet0N:
    """Order-0 'jet': value only. Lets the component formulas double as a
    plain evaluator for finite-difference cross paths."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = float(v)

    @classmethod
    def constant(cls, value, n):
        return cls(value)

    @classmethod
    def variable(cls, value, axis, n):
        return cls(value)

    @classmethod
    def from_jet2(cls, j2: Jet2, axis: int, n: int):
        return cls(j2.value)

    def _val(self, other):
        return other.v if isinstance(other, Jet0N) else float(other)

    def __add__(self, other):
        return Jet0N(self.v + self._val(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Jet0N(self.v - self._val(other))

    def __rsub__(self, other):
        return Jet0N(self._val(other) - self.v)

    def __neg__(self):
        return Jet0N(-self.v)

    def __mul__(self, other):
        return Jet0N(self.v * self._val(other))

    __rmul__ = __mul__

    def reciprocal(self):
        return Jet0N(1.0 / self.v)

    def __truediv__(self, other):
        return Jet0N(self.v / self._val(other))

    def __rtruediv__(self, other):
        return Jet0N(self._val(other) / self.v)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("jet powers are non-negative integers")
        return Jet0N(self.v ** k)


class Jet1N:
    """Order-1 jet: value and gradient only. Same arithmetic as JetN but
    without Hessian propagation; the fast path for Christoffel-only work."""

    __slots__ = ("v", "g")

    def __init__(self, v, g):
        self.v = float(v)
        self.g = np.asarray(g, dtype=float)

    @classmethod
    def constant(cls, value, n):
        return cls(value, np.zeros(n))

    @classmethod
    def variable(cls, value, axis, n):
        g = np.zeros(n)
        g[axis] = 1.0
        return cls(value, g)

    @classmethod
    def from_jet2(cls, j2: Jet2, axis: int, n: int):
        g = np.zeros(n)
        g[axis] = j2.d1
        return cls(j2.value, g)

    def _coerce(self, other):
        if isinstance(other, Jet1N):
            return other
        return Jet1N.constant(float(other), self.g.shape[0])

    def __add__(self, other):
        o = self._coerce(other)
        return Jet1N(self.v + o.v, self.g + o.g)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet1N(self.v - o.v, self.g - o.g)

    def __rsub__(self, other):
        o = self._coerce(other)
        return Jet1N(o.v - self.v, o.g - self.g)

    def __neg__(self):
        return Jet1N(-self.v, -self.g)

    def __mul__(self, other):
        o = self._coerce(other)
        return Jet1N(self.v * o.v, self.g * o.v + self.v * o.g)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.v
        return Jet1N(inv, -self.g * (inv * inv))

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("jet powers are non-negative integers")
        out = Jet1N.constant(1.0, self.g.shape[0])
        for _ in range(k):
            out = out * self
        return out


class JetN:
    """Truncated order-2 Taylor data: value, gradient (n,), Hessian (n, n)."""

    __slots__ = ("v", "g", "h")

    def __init__(self, v, g, h):
        self.v = float(v)
        self.g = np.asarray(g, dtype=float)
        self.h = np.asarray(h, dtype=float)

    @classmethod
    def constant(cls, value, n):
        return cls(value, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def variable(cls, value, axis, n):
        g = np.zeros(n)
        g[axis] = 1.0
        return cls(value, g, np.zeros((n, n)))

    @classmethod
    def from_jet2(cls, j2: Jet2, axis: int, n: int):
        """Lift a univariate 2-jet in coordinate ``axis`` to n variables."""
        g = np.zeros(n)
        g[axis] = j2.d1
        h = np.zeros((n, n))
        h[axis, axis] = j2.d2
        return cls(j2.value, g, h)

    def _coerce(self, other):
        if isinstance(other, JetN):
            return other
        return JetN.constant(float(other), self.g.shape[0])

    def __add__(self, other):
        o = self._coerce(other)
        return JetN(self.v + o.v, self.g + o.g, self.h + o.h)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return JetN(self.v - o.v, self.g - o.g, self.h - o.h)

    def __rsub__(self, other):
        o = self._coerce(other)
        return JetN(o.v - self.v, o.g - self.g, o.h - self.h)

    def __neg__(self):
        return JetN(-self.v, -self.g, -self.h)

    def __mul__(self, other):
        o = self._coerce(other)
        cross = np.outer(self.g, o.g)
        return JetN(self.v * o.v,
                    self.g * o.v + self.v * o.g,
                    self.h * o.v + self.v * o.h + cross + cross.T)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.v
        inv2 = inv * inv
        outer = np.outer(self.g, self.g)
        return JetN(inv, -self.g * inv2,
                    -self.h * inv2 + 2.0 * outer * inv2 * inv)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("JetN powers are non-negative integers")
        out = JetN.constant(1.0, self.g.shape[0])
        for _ in range(k):
            out = out * self
        return out
