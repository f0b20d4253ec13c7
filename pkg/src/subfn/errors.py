"""Exception types shared across the package."""


class SubfnError(Exception):
    """Base class for all errors raised by this package."""


class UnknownValue(SubfnError):
    """A value was requested for a subset outside the known mask."""


class DegenerateNormalization(SubfnError):
    """Normalization is undefined: the top value equals the singleton sum."""


class NotExtendable(SubfnError):
    """The partial function admits no completion in the requested class."""


class NotSymmetric(SubfnError):
    """Known sets of equal cardinality carry different values."""


class InconsistentValues(SubfnError):
    """Known sets with equal additive weight carry different values."""


class Infeasible(SubfnError):
    """The cover LP has an element no candidate contains."""


class Unbounded(SubfnError):
    """The cover LP is unbounded (a negative-cost candidate exists)."""


class TooLarge(SubfnError):
    """The requested exhaustive computation exceeds the configured size cap."""


class NegativeValues(SubfnError):
    """An operation restricted to nonnegative values received a negative one."""


class ExtensionNotFound(SubfnError):
    """The randomized extension search exhausted its restarts."""
