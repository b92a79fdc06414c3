"""Exception and warning types raised by hybrid_dicke."""


class HybridDickeError(Exception):
    """Base class for all package errors."""


class PhaseMismatch(HybridDickeError):
    """A phase-specific formula was requested outside its phase."""


class CriticalDivergence(HybridDickeError):
    """A quantity diverges because the lowest excitation energy vanishes."""


class UnstableRegime(HybridDickeError):
    """The squeeze argument is non-positive; the Hamiltonian is unbounded below."""


class CutoffTooSmall(HybridDickeError):
    pass


class OverflowRisk(HybridDickeError):
    """Requested basis dimension exceeds the configured maximum."""


class NoConvergence(HybridDickeError):
    """Eigensolver exhausted its iteration budget.

    Attributes
    ----------
    residual : float
        Best residual norm reached before giving up.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class BasisMismatch(HybridDickeError):
    pass


class InvalidAxis(HybridDickeError):
    pass


class NotAGrid(HybridDickeError):
    pass


class IoFailure(HybridDickeError):
    pass


class CutoffCeilingWarning(RuntimeWarning):
    """Fock cutoff reached ``max_cutoff`` before the occupation converged."""
