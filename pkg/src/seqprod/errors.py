"""Exception types raised by the seqprod library.

Every error derives from :class:`SeqprodError`, so callers can catch the
whole family with one handler while tests pin down the precise failure.
"""


class SeqprodError(Exception):
    """Base class for all seqprod errors."""


class DimMismatch(SeqprodError):
    """Operands live on Hilbert spaces of different dimension."""


class NotHermitian(SeqprodError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class NotPSD(SeqprodError):
    """A matrix required to be positive semidefinite has a negative eigenvalue beyond tolerance."""


class NotContraction(SeqprodError):
    """A single Kraus operator K violates K†K <= I."""


class NotNormalized(SeqprodError):
    """A Kraus family required to sum to the identity does not."""


class WrongMeasuredEffect(SeqprodError):
    """An operation does not measure the effect it was paired with."""


class ComplementMismatch(SeqprodError):
    """The second operation of a conditioning pair does not measure the complement effect."""


class BadWeights(SeqprodError):
    """Convex-combination weights are negative or do not sum to one."""


class LengthMismatch(SeqprodError):
    """Parallel sequences (outcomes vs. effects, outcomes vs. states, ...) differ in length."""


class UnknownLabel(SeqprodError):
    """An outcome label does not belong to the observable's outcome set."""


class OutcomeMismatch(SeqprodError):
    """Outcome sets that must agree (marginal vs. target observable) do not."""


class UnknownSuite(SeqprodError):
    """A verification suite name is not in the registry."""


class ParseError(SeqprodError):
    """A scenario or serialized object could not be parsed."""


class InvariantViolation(SeqprodError):
    """A domain object failed its construction invariant (named in the message)."""
