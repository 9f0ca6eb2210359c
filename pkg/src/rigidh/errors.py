"""Exception hierarchy shared by all modules."""


class RigidHError(Exception):
    """Base class for all package errors."""


class ConfigError(RigidHError):
    """Invalid configuration file or parameter set."""


class PoleEvaluation(RigidHError):
    """Scalar function evaluated at (or too close to) a pole."""


class NonFinite(RigidHError):
    """A computation produced NaN or infinity."""


class RootCollision(RigidHError):
    """Two characteristic roots coincide within tolerance at a point."""


class ZeroA(RigidHError):
    """The A (or A-tilde) factor vanishes within tolerance at a point."""


class DegenerateMetric(RigidHError):
    """The metric is singular (or an eigenvalue is within tolerance of zero)."""


class OutOfDomain(RigidHError):
    """A point lies outside the validity region of a provider."""


class StepSizeUnderflow(RigidHError):
    """Adaptive integrator cannot proceed; carries the last valid state."""

    def __init__(self, message, t=None, state=None, trajectory=None):
        super().__init__(message)
        self.t = t
        self.state = state
        self.trajectory = trajectory
