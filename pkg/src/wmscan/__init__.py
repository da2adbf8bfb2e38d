"""Wu-Manber signature scanning engine and benchmark workbench."""

from .bloom import BloomVector, bf_hash, bf_insert, bf_query
from .core import (MatchEvent, MatcherTables, Pattern, PatternSet, ScanMode,
                   compute_window, preprocess, scan, shift_for_block, verify_at)
from .errors import (CapacityExceeded, EmptyPatternSet, EmptyTrace, InputError,
                     InvalidHexDigit, OddHexLength, PatternTooShort, TruncatedHeader,
                     WmScanError, ZeroCycles)
from .kernel import KERNEL_NAME

__version__ = "0.1.0"
