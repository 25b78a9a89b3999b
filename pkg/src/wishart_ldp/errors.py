"""Exception types shared across the toolkit.

Every error raised deliberately by this package derives from
:class:`WishartLdpError`, so callers can catch the whole family with one
``except`` clause while still distinguishing the specific failure modes
documented on each subclass.
"""

from __future__ import annotations


class WishartLdpError(Exception):
    """Base class for all errors raised by this package."""


class IndefiniteInputError(WishartLdpError, ValueError):
    """A matrix that must lie in the positive semidefinite cone does not."""


class SingularPencilError(WishartLdpError, ValueError):
    """The Sylvester pencil is singular: some eigenvalue pair sums to ~zero."""


class BadInitialConditionError(WishartLdpError, ValueError):
    """An SDE initial condition violates its domain (cone, ordering, sign)."""


class DegeneratePathError(WishartLdpError, ValueError):
    """A path fails the strict interior-of-cone requirement where one is needed."""


class BlowUpError(WishartLdpError, RuntimeError):
    """A backward Riccati solution exceeded the configured norm bound."""


class DomainError(WishartLdpError, ValueError):
    """A closed-form functional was evaluated outside its domain."""


class InputFormatError(WishartLdpError, ValueError):
    """A config, path, measure, or report file could not be parsed."""
