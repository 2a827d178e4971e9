"""Exception types raised across the package.

Every error derives from :class:`LengthOptError` (itself a ``ValueError``) so
callers can catch the whole family at once.
"""


class LengthOptError(ValueError):
    pass


# table construction / transforms
class EmptyTable(LengthOptError):
    pass


class InvalidFrequency(LengthOptError):
    pass


class NonFiniteLength(LengthOptError):
    pass


class NegativeLength(LengthOptError):
    pass


class DuplicateType(LengthOptError):
    pass


class MissingForms(LengthOptError):
    pass


# statistics
class LengthMismatch(LengthOptError):
    pass


class TooFewPoints(LengthOptError):
    pass


class ZeroVariance(LengthOptError):
    pass


class AllPairsTied(LengthOptError):
    pass


class DegenerateSample(LengthOptError):
    pass


class OutOfRangeP(LengthOptError):
    pass


# scores
class ZeroLength(LengthOptError):
    pass


class DegenerateTable(LengthOptError):
    pass


# ingestion
class MalformedRow(LengthOptError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonUTF8(LengthOptError):
    pass


class NegativeDuration(LengthOptError):
    pass


class MissingDuration(LengthOptError):
    pass


class EmptyAlphabet(LengthOptError):
    pass


# analysis
class LabelMismatch(LengthOptError):
    pass
