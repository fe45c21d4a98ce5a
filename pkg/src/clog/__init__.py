"""Exact real arithmetic on continued-logarithm digit streams."""
from .core import (
    CLStream, Digit, Stall, DomainError, DegenerateError, RepresentationError,
    encode_rational, decode_rational, prefix_bound, to_decimal, compare,
)
from .interval import RatInterval

__version__ = "0.1.0"
