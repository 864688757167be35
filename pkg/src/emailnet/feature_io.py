"""bulk_extractor-compatible feature files.

Record lines are ``<forensic-path>\\t<feature>\\t<context>\\n``; lines starting
with ``#`` are comments.  Contexts are written with every byte outside
printable ASCII (and the backslash) escaped as ``\\xNN``.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from . import __version__
from .extractor import FeatureRecord
from .forensic_path import MalformedPathError, parse_forensic_path

log = logging.getLogger(__name__)

GRAMMAR_VERSION = "1"
BANNER = f"# emailnet {__version__} feature file: email grammar v{GRAMMAR_VERSION}"

_ESCAPE_RE = re.compile(rb"\\x([0-9A-Fa-f]{2})")


class FeatureFileError(ValueError):
    """Raised when no record line of a feature file could be parsed."""

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0] if self.errors else (0, "no records")
        super().__init__(f"no parseable records ({len(self.errors)} bad lines; line {first[0]}: {first[1]})")


@dataclass
class FeatureFile:
    header_comments: list[str] = field(default_factory=list)
    records: list[FeatureRecord] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)


def escape_context(raw: bytes) -> str:
    out = []
    for b in raw:
        if 0x20 <= b < 0x7F and b != 0x5C:
            out.append(chr(b))
        else:
            out.append(f"\\x{b:02X}")
    return "".join(out)


def unescape_context(text: str) -> bytes:
    return _ESCAPE_RE.sub(lambda m: bytes([int(m.group(1), 16)]), text.encode("utf-8"))


def _parse_line(line: str) -> FeatureRecord:
    fields = line.split("\t")
    if len(fields) not in (2, 3):
        raise ValueError(f"expected 2 or 3 tab-separated fields, got {len(fields)}")
    try:
        path = parse_forensic_path(fields[0])
    except MalformedPathError as exc:
        raise ValueError(str(exc)) from None
    address = fields[1]
    if address.count("@") != 1:
        raise ValueError(f"feature {address!r} is not an email address")
    context = unescape_context(fields[2]) if len(fields) == 3 else b""
    return FeatureRecord(path, address.lower(), context)


def read_feature_file(file: BinaryIO | bytes) -> FeatureFile:
    data = file if isinstance(file, (bytes, bytearray)) else file.read()
    text = bytes(data).decode("utf-8", errors="replace")
    if text.startswith("\ufeff"):
        text = text[1:]
    result = FeatureFile()
    attempted = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line:
            continue
        if line.startswith("#"):
            result.header_comments.append(line)
            continue
        attempted += 1
        try:
            result.records.append(_parse_line(line))
        except ValueError as exc:
            result.errors.append((lineno, str(exc)))
    if attempted and not result.records:
        raise FeatureFileError(result.errors)
    for lineno, msg in result.errors:
        log.warning("feature file line %d skipped: %s", lineno, msg)
    # stable: equal (base, offset) keep file order
    result.records.sort(key=lambda r: (r.path.base, r.path.offset))
    return result


def format_record(record: FeatureRecord) -> str:
    return f"{record.path.raw}\t{record.address}\t{escape_context(record.context)}\n"


def write_feature_file(records: Iterable[FeatureRecord], destination: BinaryIO) -> None:
    destination.write((BANNER + "\n").encode("utf-8"))
    for rec in records:
        destination.write(format_record(rec).encode("utf-8"))
