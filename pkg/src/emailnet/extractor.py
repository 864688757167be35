"""Linear email scanner for raw images.

The image is read front to back in chunks.  Three lanes run over every chunk:
plain ASCII bytes, and UTF-16LE text starting at even and at odd byte
positions.  Every gzip header found along the way is inflated and its
plaintext scanned recursively, with forensic paths of the form
``<offset>-GZIP-<offset>``.
"""
from __future__ import annotations

import io
import logging
import os
import zlib
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Union

import numpy as np

from . import kernels
from .forensic_path import ForensicPath

log = logging.getLogger(__name__)

__all__ = [
    "FeatureRecord",
    "GZIP_MAGIC",
    "ScanConfig",
    "ScanIOError",
    "match_email",
    "scan_compressed",
    "scan_image",
]

GZIP_MAGIC = b"\x1f\x8b\x08"
CONTEXT_BYTES = 16
# bytes kept from one chunk to the next, at minimum
_MIN_CARRY = 1024

ImageLike = Union[bytes, bytearray, memoryview, str, os.PathLike, BinaryIO]


class ScanIOError(OSError):
    """Read failure on the image; ``position`` is the byte being read."""

    def __init__(self, position: int, cause: BaseException):
        super().__init__(f"read error at byte {position}: {cause}")
        self.position = position
        self.__cause__ = cause


@dataclass(frozen=True)
class FeatureRecord:
    path: ForensicPath
    address: str
    context: bytes = b""

    def sort_key(self) -> tuple[str, int, str]:
        return (self.path.base, self.path.offset, self.address)


@dataclass(frozen=True)
class ScanConfig:
    chunk_size: int = 16 * 1024 * 1024
    overlap: int = 1024
    max_recursion_depth: int = 5
    scan_utf16: bool = True
    # cap on inflated bytes per gzip stream (decompression-bomb guard)
    max_inflate: int = 64 * 1024 * 1024

    def __post_init__(self):
        if self.overlap < 2 * kernels.MAX_ADDRESS_LEN:
            raise ValueError(f"overlap must be >= {2 * kernels.MAX_ADDRESS_LEN}")
        if self.chunk_size <= self.overlap:
            raise ValueError("chunk_size must exceed overlap")
        if self.max_recursion_depth < 0:
            raise ValueError("max_recursion_depth must be non-negative")
        if self.max_inflate <= 0:
            raise ValueError("max_inflate must be positive")


def match_email(window: bytes) -> list[tuple[int, str]]:
    """All non-overlapping ASCII email matches in ``window``.

    The window is taken as a complete buffer: its first and last bytes are
    treated as media boundaries.
    """
    matches, _, _ = kernels.scan_lane(bytes(window), 0, 0, True, True)
    return [(s, bytes(window[s:e]).decode("ascii")) for s, e in matches]


def _utf16_units(buf: bytes, parity: int) -> np.ndarray:
    """Code units of ``buf`` read as UTF-16LE from ``parity``, as one byte each.

    Units whose high byte is not zero cannot be part of an address and are
    mapped to 0x00.
    """
    arr = np.frombuffer(buf, dtype=np.uint8)[parity:]
    m = arr.size // 2
    lo = arr[0 : 2 * m : 2]
    hi = arr[1 : 2 * m : 2]
    return np.where(hi == 0, lo, 0).astype(np.uint8)


class _Source:
    """Random access to the bytes being scanned, used to inflate gzip streams."""

    def __init__(self, data=None, fileobj=None):
        self._data = data
        self._file = fileobj

    def read_at(self, offset: int, size: int) -> bytes:
        if self._data is not None:
            return bytes(self._data[offset : offset + size])
        try:
            if hasattr(self._file, "fileno"):
                try:
                    return os.pread(self._file.fileno(), size, offset)
                except (OSError, io.UnsupportedOperation, AttributeError):
                    pass
            here = self._file.tell()
            self._file.seek(offset)
            try:
                return self._file.read(size)
            finally:
                self._file.seek(here)
        except OSError as exc:
            raise ScanIOError(offset, exc) from exc


def inflate_at(source: _Source, offset: int, limit: int) -> bytes:
    """Inflate the gzip member at ``offset``.

    Corrupt or truncated streams return whatever decompressed cleanly before
    the damage; an unusable header returns ``b""``.
    """
    d = zlib.decompressobj(wbits=31)
    out = []
    total = 0
    pos = offset
    step = 256
    while total < limit and not d.eof:
        chunk = source.read_at(pos, step)
        if not chunk:
            break
        pos += len(chunk)
        step = min(step * 4, 1 << 20)
        snapshot = d.copy()
        try:
            piece = d.decompress(chunk, limit - total)
            while d.unconsumed_tail and total + len(piece) < limit:
                piece += d.decompress(d.unconsumed_tail, limit - total - len(piece))
        except zlib.error:
            # replay the failing piece a byte at a time to keep output up to the fault
            d = snapshot
            piece = b""
            for i in range(len(chunk)):
                try:
                    piece += d.decompress(chunk[i : i + 1], max(limit - total - len(piece), 1))
                except zlib.error:
                    break
                if d.eof or total + len(piece) >= limit:
                    break
            out.append(piece[: limit - total])
            total += len(out[-1])
            break
        out.append(piece)
        total += len(piece)
    return b"".join(out)[:limit]


class _Lane:
    __slots__ = ("parity", "resume", "last_end")

    def __init__(self, parity):
        # parity None is the ASCII lane; 0/1 are UTF-16LE lanes
        self.parity = parity
        self.resume = 0
        self.last_end = 0


class _StreamScanner:
    """Incremental scan of one byte stream (the image, or one inflated stream)."""

    def __init__(self, base: str, depth: int, config: ScanConfig, source: _Source):
        self.base = base
        self.depth = depth
        self.config = config
        self.source = source
        self.carry = max(config.overlap, _MIN_CARRY)
        self.buf = b""
        self.buf_abs = 0
        self.magic_resume = 0
        self.lanes = [_Lane(None)]
        if config.scan_utf16:
            self.lanes += [_Lane(0), _Lane(1)]
        self.records: list[FeatureRecord] = []

    def _emit(self, byte_start: int, byte_end: int, address: str) -> None:
        lo = max(byte_start - CONTEXT_BYTES - self.buf_abs, 0)
        hi = byte_end + CONTEXT_BYTES - self.buf_abs
        self.records.append(
            FeatureRecord(
                ForensicPath(self.base, byte_start),
                address.lower(),
                self.buf[lo:hi],
            )
        )

    def _run_lane(self, lane: _Lane, eof: bool) -> int:
        bof = self.buf_abs == 0
        if lane.parity is None:
            units = self.buf
            unit0 = self.buf_abs
        else:
            units = _utf16_units(self.buf, lane.parity)
            unit0 = self.buf_abs // 2
        matches, stop, last_end = kernels.scan_lane(
            units, max(lane.resume - unit0, 0), lane.last_end - unit0, bof, eof
        )
        for s, e in matches:
            text = bytes(units[s:e]).decode("ascii")
            if lane.parity is None:
                self._emit(unit0 + s, unit0 + e, text)
            else:
                b0 = 2 * (unit0 + s) + lane.parity
                self._emit(b0, b0 + 2 * (e - s), text)
        lane.resume = unit0 + stop
        lane.last_end = unit0 + last_end
        # byte position the next call must still be able to see
        if lane.parity is None:
            return lane.resume
        return 2 * lane.resume + lane.parity

    def _run_gzip(self, eof: bool) -> int:
        buf = self.buf
        n = len(buf)
        limit = n if eof else n - len(GZIP_MAGIC) + 1
        i = max(self.magic_resume - self.buf_abs, 0)
        while True:
            i = buf.find(GZIP_MAGIC, i)
            if i < 0 or i >= limit:
                break
            where = self.buf_abs + i
            if self.depth < self.config.max_recursion_depth:
                parent = ForensicPath(self.base, where)
                plain = inflate_at(self.source, where, self.config.max_inflate)
                if plain:
                    self.records.extend(
                        _scan_plain(plain, parent.child_base("GZIP"), self.depth + 1, self.config)
                    )
            i += 1
        self.magic_resume = self.buf_abs + max(limit, 0)
        return self.magic_resume

    def feed(self, data: bytes, eof: bool = False) -> None:
        self.buf = self.buf + bytes(data) if self.buf else bytes(data)
        needed = [self._run_lane(lane, eof) for lane in self.lanes]
        needed.append(self._run_gzip(eof))
        if eof:
            return
        keep = min(needed) - self.carry
        keep -= keep % 2  # lanes rely on buf_abs staying even
        if keep > self.buf_abs:
            self.buf = self.buf[keep - self.buf_abs :]
            self.buf_abs = keep


def _scan_plain(data: bytes, base: str, depth: int, config: ScanConfig) -> list[FeatureRecord]:
    scanner = _StreamScanner(base, depth, config, _Source(data=data))
    scanner.feed(data, eof=True)
    return scanner.records


def scan_compressed(
    region: bytes, parent_path: ForensicPath, depth: int, config: ScanConfig | None = None
) -> list[FeatureRecord]:
    """Inflate the gzip stream at the start of ``region`` and scan its plaintext.

    Records get base ``parent_path.raw + "-GZIP"``.  ``depth`` counts how
    many gzip layers enclose ``region``; nothing is done once it reaches
    ``config.max_recursion_depth``.
    """
    config = config or ScanConfig()
    if depth >= config.max_recursion_depth or not bytes(region[:3]) == GZIP_MAGIC:
        return []
    plain = inflate_at(_Source(data=region), 0, config.max_inflate)
    if not plain:
        return []
    return sorted(
        _scan_plain(plain, parent_path.child_base("GZIP"), depth + 1, config),
        key=FeatureRecord.sort_key,
    )


def _chunks(fileobj, chunk_size: int) -> Iterable[tuple[int, bytes]]:
    pos = 0
    while True:
        try:
            data = fileobj.read(chunk_size)
        except OSError as exc:
            raise ScanIOError(pos, exc) from exc
        if not data:
            return
        yield pos, data
        pos += len(data)


def scan_image(image: ImageLike, config: ScanConfig | None = None) -> list[FeatureRecord]:
    """Every email occurrence in ``image``, sorted by (base, offset).

    ``image`` may be a bytes-like object, a path, or a binary file object
    opened for reading.
    """
    config = config or ScanConfig()
    if isinstance(image, (bytes, bytearray, memoryview)):
        data = bytes(image)
        scanner = _StreamScanner("", 0, config, _Source(data=data))
        if not data:
            return []
        step = config.chunk_size
        for pos in range(0, len(data), step):
            scanner.feed(data[pos : pos + step], eof=pos + step >= len(data))
        return sorted(scanner.records, key=FeatureRecord.sort_key)

    if isinstance(image, (str, os.PathLike)):
        with open(image, "rb") as fh:
            return scan_image(fh, config)

    scanner = _StreamScanner("", 0, config, _Source(fileobj=image))
    pending = None
    for _, data in _chunks(image, config.chunk_size):
        if pending is not None:
            scanner.feed(pending, eof=False)
        pending = data
    if pending is not None:
        scanner.feed(pending, eof=True)
    log.debug("scanned image: %d records", len(scanner.records))
    return sorted(scanner.records, key=FeatureRecord.sort_key)
