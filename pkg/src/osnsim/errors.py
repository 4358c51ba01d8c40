"""Exception types raised across the package.

Every error the library raises deliberately derives from OsnsimError so
callers (and the CLI) can catch one base class and emit structured
diagnostics.
"""


class OsnsimError(Exception):
    """Base class for all package errors."""

    code = "error"


class UnknownAction(OsnsimError):
    code = "unknown_action"


class EmptyLog(OsnsimError):
    code = "empty_log"


class FormatError(OsnsimError):
    """Malformed input line; carries the 1-based line number."""

    code = "format_error"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class LengthMismatch(OsnsimError):
    code = "length_mismatch"


class SeriesTooShort(OsnsimError):
    code = "series_too_short"


class UnknownSeed(OsnsimError):
    code = "unknown_seed"


class BadConfig(OsnsimError):
    code = "bad_config"


class AllZeroWeights(OsnsimError):
    code = "all_zero_weights"


class ClockSkew(OsnsimError):
    code = "clock_skew"


class KeyMismatch(OsnsimError):
    code = "key_mismatch"


class EmptyWindow(OsnsimError):
    code = "empty_window"


class NegativeValue(OsnsimError):
    code = "negative_value"


class TooFewEvents(OsnsimError):
    code = "too_few_events"


class EmptySample(OsnsimError):
    code = "empty_sample"


class SupportMismatch(OsnsimError):
    code = "support_mismatch"


class BadPersistence(OsnsimError):
    code = "bad_persistence"


class DisjointTimeRanges(OsnsimError):
    code = "disjoint_time_ranges"


class NotFittedError(OsnsimError):
    code = "not_fitted"
