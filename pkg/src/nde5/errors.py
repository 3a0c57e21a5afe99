"""Exception types raised by the solvers."""


class Nde5Error(Exception):
    """Base class for all library errors."""


class StepFailure(Nde5Error):
    """The adaptive step size collapsed (usually a degenerate point g -> 0)."""


class SameClassAtBracket(Nde5Error):
    """Both ends of a shooting bracket fell into the same tail class."""


class NewtonDiverged(Nde5Error):
    pass


class SingularJacobian(Nde5Error):
    pass


class FitDiverged(Nde5Error):
    pass


class DegenerateFit(Nde5Error):
    """A rate fit was requested on data that vanishes identically."""


class InsufficientTail(Nde5Error):
    pass


class NoOscillation(Nde5Error):
    pass


class BranchCollapse(Nde5Error):
    pass


class BlowupDetected(Nde5Error):
    pass


class SpectralTailRise(Nde5Error):
    pass
