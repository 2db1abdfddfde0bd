"""Exception hierarchy shared by every cuqp module."""


class CuqpError(ValueError):
    """Base class for all errors raised by cuqp."""


class ShortReadError(CuqpError):
    pass


class SampleRangeError(CuqpError):
    pass


class SpecMismatchError(CuqpError):
    pass


class EmptyBlockError(CuqpError):
    pass


class NoCusError(CuqpError):
    pass


class InvalidLambdaError(CuqpError):
    pass


class IncomparableError(CuqpError):
    pass


class DisjointCurvesError(CuqpError):
    pass


class DegenerateCurveError(CuqpError):
    pass


class MapFormatError(CuqpError):
    pass
