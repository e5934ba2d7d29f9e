"""Exception types shared across the package."""

from __future__ import annotations


class TwistlatError(Exception):
    """Base class for all package errors."""


class InputError(TwistlatError, ValueError):
    """Raised for malformed or inconsistent user input (bad Gram, non-isometry, ...)."""


class InvariantViolation(TwistlatError):
    """A mathematical guard failed.

    These are never user errors: they mean a computed object contradicts an
    identity that is supposed to hold for every input.  ``witness`` carries
    whatever concrete data exhibits the failure.
    """

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness
