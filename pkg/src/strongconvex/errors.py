"""Exception hierarchy shared by every module of the toolkit."""


class StrongConvexError(Exception):
    """Base class for all toolkit errors."""


class DomainError(StrongConvexError, ValueError):
    """A point, weight or parameter lies outside the admissible set."""


class PreconditionError(StrongConvexError, ValueError):
    """An operation was called with inputs that violate its hypotheses."""


class SpectrumError(DomainError):
    """A matrix spectrum leaves the interval a function is defined on."""


class UnsupportedError(StrongConvexError):
    """The requested check needs data the function object does not carry."""


class ConfigurationError(StrongConvexError, ValueError):
    """Invalid run configuration, sampling box, check id or output format."""
