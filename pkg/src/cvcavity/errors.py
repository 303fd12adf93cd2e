"""Exception and warning types shared across the package."""


class IntegrationError(RuntimeError):
    """A trajectory produced a non-finite or invalid state component.

    Carries the dimensionless time at which the step failed.
    """

    def __init__(self, message, t_tilde=None):
        super().__init__(message)
        self.t_tilde = t_tilde


class PhaseSingularityError(ValueError):
    """The squeezing-phase derivative is singular at (near-)zero squeezing.

    The tanh(2u) denominator vanishes at u = 0.  For vacuum-initial runs the
    phase follows the analytic rotation at the sum frequency and the reduced
    system (which is regular at u = 0) must be used instead.
    """


class FockTruncationError(RuntimeError):
    """Population reached the top Fock shells; the truncated basis is too small."""


class RingRegimeWarning(UserWarning):
    """Ring-filter closed form used outside its (1 - sigma_P a_P) << 1 regime."""


class FockTruncationWarning(UserWarning):
    """Requested state is marginal for the chosen photon-number cutoff."""


class WindowBoundaryWarning(UserWarning):
    """A located extremum sits on the integration-window boundary."""
