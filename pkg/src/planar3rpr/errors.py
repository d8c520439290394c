"""Exception hierarchy for the planar3rpr package.

Every error raised intentionally by the library derives from RobotModelError so
callers (and the CLI) can distinguish domain failures from programming bugs.
"""


class RobotModelError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RobotModelError):
    """An argument is outside the operation's domain (bad index, bad range, ...)."""


class SerialSingularityError(RobotModelError):
    """A leg has collapsed (rho ~ 0), so its direction angle is undefined."""

    def __init__(self, leg, rho):
        self.leg = leg
        self.rho = rho
        super().__init__(f"serial singularity: leg {leg} has rho = {rho:.3e}")


class InconsistentSensorsError(RobotModelError):
    """Sensor readings do not describe a rigid platform placement."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"inconsistent sensor readings: leg-3 residual {residual:.6g} >= tol {tol:.6g}"
        )


class SingularTransmissionError(RobotModelError):
    """The direct Jacobian is (numerically) singular for the requested solve."""

    def __init__(self, margin, tol):
        self.margin = margin
        self.tol = tol
        super().__init__(
            f"singular transmission: normalized |det A| = {margin:.3e} < tol {tol:.3e}"
        )


class UnsupportedGeometryError(RobotModelError):
    """A closed-form expression valid only for the canonical dimensions was requested."""


class JointLimitError(RobotModelError):
    """A joint variable lies outside its admissible range."""


class InfeasibleDesignError(RobotModelError):
    """Requested scissor dimensions violate the feasibility constraint l > 3h."""


class InfeasiblePathError(RobotModelError):
    """A path leaves the workspace (or no mode assignment exists along it)."""

    def __init__(self, message, samples=()):
        self.samples = list(samples)
        super().__init__(message)
