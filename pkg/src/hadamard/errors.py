"""Shared exception types.

The CLI maps these onto exit codes: validation and input problems exit
with 2, resource-cap refusals with 3.
"""

from __future__ import annotations


class HadamardError(Exception):
    """Base class for errors raised by this package."""


class FieldMismatchError(HadamardError):
    """Operands belong to different fields."""


class ArityMismatchError(HadamardError):
    """Operands disagree on the number of variables."""


class ShapeError(HadamardError):
    """Matrix or vector dimensions do not line up."""


class ValidationError(HadamardError):
    """A structural invariant of an object is violated."""


class ResourceCapError(HadamardError):
    """A dense expansion would exceed the configured size cap."""


DEFAULT_MAX_TERMS = 1 << 20
DEFAULT_MAX_DEGREE = 32
