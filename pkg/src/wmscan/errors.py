"""Exception hierarchy for wmscan.

Input and parse problems derive from :class:`InputError` (CLI exit 1);
size limits derive from :class:`CapacityExceeded` (CLI exit 2).
"""


class WmScanError(Exception):
    """Base class for all wmscan errors."""


class InputError(WmScanError, ValueError):
    """Malformed or unusable input."""


class EmptyPatternSet(InputError):
    pass


class PatternTooShort(InputError):
    def __init__(self, pattern_id, length, minimum=2):
        self.pattern_id = pattern_id
        self.length = length
        super().__init__(
            f"pattern {pattern_id} has length {length}, minimum is {minimum}"
        )


class HexDecodeError(InputError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class OddHexLength(HexDecodeError):
    pass


class InvalidHexDigit(HexDecodeError):
    pass


class TruncatedHeader(InputError):
    pass


class EmptyTrace(InputError):
    pass


class TableFormatError(InputError):
    """A serialized table container could not be parsed."""


class ZeroCycles(WmScanError, ValueError):
    pass


class CapacityExceeded(WmScanError):
    pass
