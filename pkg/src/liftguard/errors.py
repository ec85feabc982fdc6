"""Exception hierarchy.

Every error raised on bad input derives from :class:`ValidationError`, so
callers (the CLI in particular) can catch one type and report the class
name as the violated invariant.
"""


class ValidationError(ValueError):
    """Base class for rejected inputs."""


class NegativeEntry(ValidationError):
    pass


class SumNotOne(ValidationError):
    pass


class ZeroMarginal(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class DegenerateDraw(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class EmptyHighRiskSet(ValidationError):
    pass


class InvalidAlpha(ValidationError):
    pass


class InvalidBudget(ValidationError):
    pass


class ConfigError(ValidationError):
    pass
