"""Exception hierarchy shared by every module.

All errors derive from :class:`RdError` (itself a ``ValueError``) so callers
can catch the whole family at once; the CLI maps them onto exit codes.
"""


class RdError(ValueError):
    """Base class for invalid RD data or unusable inputs."""


# rd_model
class EmptyOrSingleton(RdError):
    pass


class DuplicateRate(RdError):
    pass


class NonMonotoneQuality(RdError):
    pass


class NonPositiveRate(RdError):
    pass


class NonFiniteQuality(RdError):
    pass


class MissingCell(RdError):
    pass


class MixedUnits(RdError):
    pass


class DuplicateCell(RdError):
    pass


# interpolation
class DuplicateAbscissa(RdError):
    pass


class WrongKnotCount(RdError):
    pass


class TooFewKnots(RdError):
    pass


class OutOfDomain(RdError):
    pass


# bd_metrics
class NoOverlap(RdError):
    """The two curves share no usable span on the integration axis."""

    def __init__(self, message, ref_span=None, test_span=None):
        super().__init__(message)
        self.ref_span = ref_span
        self.test_span = test_span


# aggregation
class RaggedPointCounts(RdError):
    pass


class GridOutsideSpan(RdError):
    def __init__(self, sequence, message=None):
        super().__init__(message or f"grid leaves the quality span of sequence {sequence!r}")
        self.sequence = sequence


class EmptyInput(RdError):
    pass


class MixedMetricKinds(RdError):
    pass


class UnknownIdentifier(RdError):
    pass


# io_report
class MalformedHeader(RdError):
    pass


class NonNumericField(RdError):
    def __init__(self, line, message=None):
        super().__init__(message or f"line {line}: non-numeric field")
        self.line = line


class DuplicateTriple(RdError):
    def __init__(self, line, message=None):
        super().__init__(message or f"line {line}: duplicate (codec, sequence, rate)")
        self.line = line


class UnknownUnit(RdError):
    pass


class InvalidScenario(RdError):
    pass
