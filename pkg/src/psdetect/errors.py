"""Exception types raised across the package."""


class PsdetectError(Exception):
    """Base class for every error raised by psdetect."""


class NegativeCountError(PsdetectError, ValueError):
    pass


class EmptyArmError(PsdetectError, ValueError):
    """A treatment arm has no observations, so its conditionals are inestimable."""


class MissingComponentError(PsdetectError, ValueError):
    pass


class SchemaMismatchError(PsdetectError, ValueError):
    pass


class EmptyStratumError(PsdetectError, ZeroDivisionError):
    pass


class MonotonicityViolatedError(PsdetectError, ValueError):
    pass


class DegenerateDenominatorError(PsdetectError, ZeroDivisionError):
    pass


class ParamOutOfRangeError(PsdetectError, ValueError):
    pass


class ZeroVarianceError(PsdetectError, ValueError):
    pass


class EmptyOutcomeSelectorError(PsdetectError, ValueError):
    pass


class ParseError(PsdetectError, ValueError):
    pass


class ConfigConflictError(PsdetectError, ValueError):
    pass
