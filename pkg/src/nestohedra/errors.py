"""Exception hierarchy shared by all modules."""


class NestoError(Exception):
    """Base class for every error raised by :mod:`nestohedra`."""


class InputError(NestoError, ValueError):
    """Malformed input: empty or out-of-range subsets, bad labels, bad JSON."""


class CapacityError(NestoError):
    """A ground-size limit or an enumeration budget was exceeded."""


class PreconditionError(NestoError, ValueError):
    """Input is well formed but violates an operation's precondition."""


class NotFlagError(PreconditionError):
    """The building set or polytope is not flag."""


class NotSimpleError(NestoError):
    """A polytope (or an h-vector) failed a simplicity check."""


class ConsistencyError(NestoError):
    """An internal invariant failed; this signals a bug or an unexpected input."""


class PlanError(ConsistencyError):
    """A shaving plan does not match the polytope it is applied to."""


class RealizationError(ConsistencyError):
    """An incremental geometric realization went out of sync with its plan."""
