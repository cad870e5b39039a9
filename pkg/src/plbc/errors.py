"""Exception types shared across the package."""


class InvalidCode(ValueError):
    """Generator matrices do not define a partitioned code (C1 and C0 intersect)."""


class InvalidSpec(ValueError):
    """A PBCH specification violates g1 | g0 | x^n + 1."""


class UnsupportedComputation(RuntimeError):
    """An exhaustive computation exceeds its size limit."""


class DecodeFailure(RuntimeError):
    """The corrected word is not a codeword."""


class InvariantViolation(AssertionError):
    """Internal consistency check failed; usually wrong d0 metadata."""
