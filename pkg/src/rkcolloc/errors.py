"""Exception types raised by the collocation pipeline.

Everything derives from :class:`RKCollocError` so callers can catch the
whole family at once.  Numerical guards raise specific subclasses with the
offending quantity attached to the message; nothing in this package
silently substitutes a fallback value when a guard trips.
"""


class RKCollocError(Exception):
    """Base class for all errors raised by rkcolloc."""


class SingularMatrix(RKCollocError):
    """A direct solve hit an (effectively) zero pivot."""


class ConvergenceFailure(RKCollocError):
    """An iterative eigenvalue computation did not converge."""


class IllConditionedConstruction(RKCollocError):
    """A kernel-table linear system was too ill conditioned to trust."""


class DegenerateConstraint(RKCollocError):
    """A boundary functional (nearly) annihilates the current kernel."""


class SmoothnessExceeded(RKCollocError):
    """A derivative order beyond what the space supports was requested."""


class OutOfDomain(RKCollocError):
    """An evaluation point lies outside the kernel's interval or box."""


class LossOfPositivity(RKCollocError):
    """Orthonormalization produced a non-positive squared norm."""


class DegenerateNode(RKCollocError):
    """A collocation node (nearly) annihilates the kernel diagonal."""


class Divergence(RKCollocError):
    """Time integration produced a non-finite state."""


class ZeroReference(RKCollocError):
    """A relative error was requested against an identically-zero reference."""
