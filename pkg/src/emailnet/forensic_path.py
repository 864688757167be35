"""Forensic path parsing and distance.

A forensic path is the hyphen-delimited location string written by
bulk_extractor-style tools, e.g. ``"1048576-GZIP-512"``.  The final integer is
the offset inside the innermost byte stream; everything before it (the
transform chain) is the *base*.  Offsets are only comparable within one base.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "INFINITE",
    "ForensicPath",
    "MalformedPathError",
    "distance",
    "parse_forensic_path",
]

MAX_OFFSET = 2**64 - 1

# Out-of-band distance between paths with different bases.  It compares
# greater than any int, so ``distance(a, b) < window`` is always False for it.
INFINITE = math.inf


class MalformedPathError(ValueError):
    """Raised when a string is not a valid forensic path."""


@dataclass(frozen=True, order=False)
class ForensicPath:
    base: str
    offset: int

    @property
    def raw(self) -> str:
        if self.base:
            return f"{self.base}-{self.offset}"
        return str(self.offset)

    def child_base(self, transform: str = "GZIP") -> str:
        """Base for features found inside a stream decoded at this location."""
        return f"{self.raw}-{transform}"

    def sort_key(self) -> tuple[str, int]:
        return (self.base, self.offset)

    def __str__(self) -> str:
        return self.raw


def _parse_offset(token: str, raw: str) -> int:
    # str.isdigit() accepts non-ASCII digits; be strict
    if not token or not all("0" <= ch <= "9" for ch in token):
        raise MalformedPathError(f"final token of {raw!r} is not a decimal integer")
    value = int(token)
    if value > MAX_OFFSET:
        raise MalformedPathError(f"offset in {raw!r} overflows 64 bits")
    return value


def parse_forensic_path(raw: str) -> ForensicPath:
    if not raw:
        raise MalformedPathError("empty forensic path")
    base, sep, token = raw.rpartition("-")
    offset = _parse_offset(token, raw)
    if sep and not base:
        raise MalformedPathError(f"{raw!r} has an empty base before the hyphen")
    if base.endswith("-"):
        raise MalformedPathError(f"{raw!r} contains an empty path component")
    return ForensicPath(base, offset)


def distance(a: ForensicPath, b: ForensicPath) -> int | float:
    """Byte distance between two features, or INFINITE across bases."""
    if a.base != b.base:
        return INFINITE
    return abs(a.offset - b.offset)
