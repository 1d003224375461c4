"""Exception hierarchy.

Errors fall into two families that the command line maps to exit codes:
``SpecError`` (malformed input, exit 2) and ``NumericalError`` (the chart
point is unusable, exit 3).
"""


class SolitonForgeError(Exception):
    """Base class for every error raised by the package."""


class SpecError(SolitonForgeError):
    """The user-supplied description is malformed."""


class ExprError(SpecError):
    pass


class ExprSyntaxError(ExprError):
    """Expression text does not follow the grammar.

    ``offset`` is the byte offset (UTF-8) of the offending position.
    """

    def __init__(self, message, text="", offset=0):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifier(ExprError):
    def __init__(self, name, text="", offset=0):
        self.name = name
        self.text = text
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class SchemaError(SpecError):
    """A spec document violates its schema; ``pointer`` is a JSON pointer."""

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class MissingLambda(SpecError):
    pass


class DimensionError(SpecError):
    pass


class OrderError(SolitonForgeError):
    """A derivative of higher degree than the jet order was requested."""


class NumericalError(SolitonForgeError):
    """The point is outside the region where the data is well defined."""


class DomainError(NumericalError):
    """Invalid argument to an elementary function (log, sqrt, division...).

    ``expression`` is filled in by the expression evaluator with the text of
    the innermost subexpression that failed.
    """

    def __init__(self, message, expression=None):
        self.expression = expression
        if expression is not None:
            message = f"{message} in '{expression}'"
        super().__init__(message)


class SingularMetric(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class ZeroVectorField(NumericalError):
    pass


class HypothesisUnmet(SolitonForgeError):
    """A check was requested where its geometric hypothesis does not hold."""


class NotGradient(HypothesisUnmet):
    pass


class NotTorseForming(HypothesisUnmet):
    pass


class NotConcircular(HypothesisUnmet):
    pass
