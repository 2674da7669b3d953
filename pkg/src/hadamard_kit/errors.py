"""Exception types raised across the toolkit."""


class HadamardError(Exception):
    """Base class for all toolkit errors."""


class ConstructionError(HadamardError, ValueError):
    """A space descriptor is structurally invalid (cyclic tree, bad edge, ...)."""


class SpaceMismatchError(HadamardError, TypeError):
    """A point does not belong to the space it was used with."""


class DomainError(HadamardError, ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(HadamardError, ValueError):
    """A documented precondition of an operation does not hold."""


class UnsupportedRepresentationError(HadamardError, NotImplementedError):
    """A representation is requested in a space that cannot support it."""


class ParseError(HadamardError, ValueError):
    """Input JSON does not match the expected schema."""


class SolverError(HadamardError, RuntimeError):
    """A numerical routine could not produce a usable answer."""
