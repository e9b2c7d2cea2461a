"""Exception hierarchy shared by every bplot module."""


class BPlotError(Exception):
    """Base class for all errors raised by bplot."""


class EmptySample(BPlotError, ValueError):
    pass


class NonFiniteValue(BPlotError, ValueError):
    pass


class TiesPresent(BPlotError, ValueError):
    """Raised when exact duplicates occur and the tie policy is ``error``."""


class SampleTooSmall(BPlotError, ValueError):
    pass


class POutOfRange(BPlotError, ValueError):
    pass


class InvalidAlpha(BPlotError, ValueError):
    pass


class TooFewReplicates(BPlotError, ValueError):
    pass


class EmptyDecile(BPlotError, UserWarning):
    """Some decile interval holds no grid point; the interval is skipped."""


class TooLargeToEnumerate(BPlotError, ValueError):
    pass


class ModelNotFullySpecified(BPlotError):
    """The model's definition lives only in an external reference."""


class UnknownModel(BPlotError, KeyError):
    pass


class ParseError(BPlotError, ValueError):
    def __init__(self, path, line, text):
        self.path = str(path)
        self.line = line
        self.text = text
        super().__init__(f"{path}:{line}: cannot parse {text!r} as a number")


class EmptyFile(BPlotError, ValueError):
    pass
