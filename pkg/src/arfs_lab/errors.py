"""Exception hierarchy for arfs-lab.

Every contract violation raises a dedicated class so callers (and the CLI)
can distinguish bad inputs from failed numerical checks.
"""


class ArfsLabError(Exception):
    """Base class for all arfs-lab errors."""


class TolTooSmall(ArfsLabError):
    """A certified computation would exceed its sample budget."""


class DimensionCap(ArfsLabError):
    """An input exceeds the configured dimension cap."""


class DegenerateInput(ArfsLabError):
    """Inputs coincide where distinctness is required."""


class IllConditioned(ArfsLabError):
    """A linear system is too ill-conditioned to solve reliably."""


class NearCoincidentExponents(ArfsLabError):
    """Two exponents are too close for the recursion to be stable."""


class PreconditionViolated(ArfsLabError):
    """A documented precondition does not hold."""


class GapViolated(ArfsLabError):
    """A separation (gap) hypothesis does not hold."""


class HypothesisViolated(ArfsLabError):
    """A bound's hypothesis (gap condition or reciprocal-sum cap) fails."""


class ThresholdViolated(ArfsLabError):
    """A time argument lies below the bound's validity threshold."""


class RTooLarge(ArfsLabError):
    """Perturbation radius is not strictly below the criterion constant."""


class NotAnARFS(ArfsLabError):
    """The family fails the positivity criterion required by the operation."""


class NotSurjective(ArfsLabError):
    """The operator does not map onto the target space."""


class ZeroVector(ArfsLabError):
    """A vector required to be nonzero is zero."""


class NotSpanning(ArfsLabError):
    """Family members do not span the ambient space."""


class ScheduleStall(ArfsLabError):
    """The greedy schedule cannot make progress (internal error when spanning)."""


class NoConvergence(ArfsLabError):
    """An iterative solver exhausted its budget without converging."""


class ConfigInvalid(ArfsLabError):
    """A scenario configuration does not validate against the schema."""


class CheckFailed(ArfsLabError):
    """One or more scenario checks reported a failing margin."""
