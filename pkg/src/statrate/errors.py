"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: usage/config problems
exit 2, solvable-constraint failures exit 3, I/O and parse failures
exit 4.
"""


class ConfigError(ValueError):
    """A configuration file violates its schema."""


class NoSolutionError(ValueError):
    """A constraint has no solution in the admissible range."""


class InsufficientTailDataError(ValueError):
    """Too few tail samples to fit or calibrate a tail model."""


class NoValidTiltError(ValueError):
    """No exponential tilt satisfies the MGF domain constraint."""


class SampleParseError(ValueError):
    """A sample file could not be parsed.

    Attributes
    ----------
    line_no : int or None
        1-based line number of the offending line, when known.
    """

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no
