"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
3 for parse/validation problems, 4 for failures while fitting.
"""


class PullfitError(Exception):
    exit_code = 4


# -- parse / validation (exit 3) ---------------------------------------------

class ValidationError(PullfitError, ValueError):
    exit_code = 3


class InvalidSpec(ValidationError):
    pass


class InvalidDesign(ValidationError):
    pass


class InvalidCounts(ValidationError):
    pass


class GridError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(ParseError):
    pass


class RowError(ParseError):
    pass


class ConsistencyError(ParseError):
    pass


# -- data / numerical failures (exit 4) --------------------------------------

class EmptyDesign(PullfitError, ValueError):
    pass


class EmptySelection(PullfitError, ValueError):
    pass


class EmptyValues(PullfitError, ValueError):
    pass


class EmptyObservations(PullfitError, ValueError):
    pass


class InsufficientSingles(PullfitError, ValueError):
    pass


class InsufficientSamples(PullfitError, ValueError):
    pass


class DegenerateDistribution(PullfitError, ValueError):
    pass


class WeightOutOfRange(PullfitError, ValueError):
    pass


class InvalidBandwidth(PullfitError, ValueError):
    pass


class InvalidGrid(PullfitError, ValueError):
    pass


class NonFinite(PullfitError, ArithmeticError):
    pass


class MissingCondition(PullfitError, ValueError):
    pass
