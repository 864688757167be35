import gzip
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emailnet.extractor import (
    ScanConfig,
    ScanIOError,
    match_email,
    scan_compressed,
    scan_image,
)
from emailnet.forensic_path import parse_forensic_path
from oracles import email_oracle

SMALL = ScanConfig(chunk_size=2048, overlap=1024)


def found(records):
    return [(r.path.raw, r.address) for r in records]


# -- grammar ------------------------------------------------------------------

def test_trailing_dot_excluded(backend):
    assert match_email(b"see pat@m57.biz.") == [(4, "pat@m57.biz")]


def test_no_domain(backend):
    assert match_email(b"not-an-email@") == []


def test_single_char_tld(backend):
    assert match_email(b"a@b.c") == []


@pytest.mark.parametrize("text", [
    "x@y.z9", "x@y.co-", "x@-.co", "x@y..co", "@y.co", "x@.co", "x@co",
])
def test_rejects(backend, text):
    assert match_email(text.encode()) == email_oracle(text)


def test_boundaries(backend):
    assert match_email(b"a@b.co@c.org") == [(0, "a@b.co")]
    assert match_email(b"<ann@x.org>, <bo@y.net>") == [(1, "ann@x.org"), (14, "bo@y.net")]
    assert match_email(b"a@b.com.x") == [(0, "a@b.com")]


def test_length_cap(backend):
    local = "a" * 240
    ok = f"{local}@bb.cc.dd"  # 249 chars
    assert match_email(ok.encode()) == [(0, ok)]
    long = f"{local}@{'b' * 20}.{'c' * 10}"  # 272 chars: longest valid prefix must fit
    assert match_email(long.encode()) == email_oracle(long)
    assert match_email(("a" * 250 + "@bb.cc").encode()) == []


ALPHABET = "ab.-@_+%Z9 \n<>"


@settings(max_examples=400, deadline=None)
@given(st.text(alphabet=ALPHABET, max_size=40))
def test_grammar_matches_oracle(text):
    assert match_email(text.encode()) == email_oracle(text)


def test_grammar_oracle_both_backends(backend):
    rng = random.Random(7)
    for _ in range(300):
        text = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 50)))
        assert match_email(text.encode()) == email_oracle(text), text


def test_long_domain_cap_against_oracle(backend):
    text = "q@" + ".".join(["abcdefghij"] * 30) + " tail"
    assert match_email(text.encode()) == email_oracle(text)


# -- scan_image ---------------------------------------------------------------

def test_single_literal(backend):
    recs = scan_image(b"xx alice@example.com yy")
    assert found(recs) == [("3", "alice@example.com")]
    assert recs[0].path.base == ""


def test_every_occurrence(backend):
    img = bytearray(b" " * 200)
    img[3:3 + 10] = b"al@ex.com "
    img[100:110] = b"al@ex.com "
    assert found(scan_image(bytes(img))) == [("3", "al@ex.com"), ("100", "al@ex.com")]


def test_lowercase_with_context(backend):
    recs = scan_image(b"From: Pat <Pat@M57.Biz>")
    assert recs[0].address == "pat@m57.biz"
    assert b"Pat@M57.Biz" in recs[0].context
    assert len(recs[0].context) <= len("pat@m57.biz") + 32


def test_empty_image(backend):
    assert scan_image(b"") == []


def test_utf16(backend):
    for pad in (b"", b"z"):
        img = b"\xff\xfe" + pad + "mail ann@corp.com!".encode("utf-16-le")
        recs = scan_image(img)
        assert found(recs) == [(str(2 + len(pad) + 10), "ann@corp.com")]


def test_utf16_disabled(backend):
    img = "ann@corp.com".encode("utf-16-le")
    assert scan_image(img, ScanConfig(scan_utf16=False)) == []


def test_truncated_at_end(backend):
    assert scan_image(b"xx bob@mail.") == []


# -- gzip -----------------------------------------------------------------------

def test_gzip_region_at_4096(backend):
    img = b"\x00" * 4096 + gzip.compress(b"hi bob@x.org", mtime=0) + b"\x00" * 100
    assert found(scan_image(img)) == [("4096-GZIP-3", "bob@x.org")]


def test_nested_gzip(backend):
    img = gzip.compress(gzip.compress(b"a@b.co", mtime=0), mtime=0)
    recs = scan_image(img)
    assert [r.path.base for r in recs] == ["0-GZIP-0-GZIP"]
    assert recs[0].address == "a@b.co"


def test_gzip_without_addresses(backend):
    region = gzip.compress(b"nothing to see here", mtime=0)
    assert scan_compressed(region, parse_forensic_path("10"), 0, ScanConfig()) == []


def test_scan_compressed_paths(backend):
    region = gzip.compress(b"to: zed@q.io", mtime=0)
    recs = scan_compressed(region, parse_forensic_path("77"), 0, ScanConfig())
    assert found(recs) == [("77-GZIP-4", "zed@q.io")]


def test_recursion_depth_limit(backend):
    data = b"a@b.co"
    for _ in range(3):
        data = gzip.compress(data, mtime=0)
    assert found(scan_image(data, ScanConfig(max_recursion_depth=2))) == []
    assert found(scan_image(data, ScanConfig(max_recursion_depth=3))) == [("0-GZIP-0-GZIP-0-GZIP-0", "a@b.co")]
    assert scan_image(gzip.compress(b"a@b.co"), ScanConfig(max_recursion_depth=0)) == []


def test_corrupt_gzip_partial_output(backend):
    plain = b"first@one.org " + bytes(random.Random(1).randrange(256) for _ in range(50000)) + b" last@two.org"
    stream = gzip.compress(plain, mtime=0)
    broken = stream[: len(stream) // 2]
    recs = scan_image(b"\x00" * 64 + broken + b"\x00" * 64)
    assert ("64-GZIP-0", "first@one.org") in found(recs)
    assert all(r.address != "last@two.org" for r in recs)


def test_bad_gzip_header_is_ignored(backend):
    img = b"\x1f\x8b\x08garbage alice@x.org"
    assert found(scan_image(img)) == [("11", "alice@x.org")]


# -- streaming ------------------------------------------------------------------

def _random_image(rng, size, n_addr):
    img = bytearray(rng.randbytes(size))
    for _ in range(n_addr):
        addr = f"{rng.choice(['u', 'joe.b', 'x_y'])}{rng.randint(0, 999)}@{rng.choice(['a', 'bb'])}.{rng.choice(['com', 'org'])}"
        if rng.random() < 0.3:
            blob = addr.encode("utf-16-le")
        elif rng.random() < 0.2:
            blob = gzip.compress(addr.encode(), mtime=0)
        else:
            blob = addr.encode()
        at = rng.randrange(0, size - len(blob))
        img[at:at + len(blob)] = blob
    return bytes(img)


def test_chunked_equals_whole(backend):
    rng = random.Random(11)
    for trial in range(12):
        img = _random_image(rng, rng.randint(3000, 30000), rng.randint(1, 40))
        whole = scan_image(img, ScanConfig(chunk_size=len(img) + 2048, overlap=1024))
        for chunk in (1025, 1500, 2048, 4099):
            cfg = ScanConfig(chunk_size=chunk, overlap=1024)
            assert scan_image(img, cfg) == whole
            assert scan_image(io.BytesIO(img), cfg) == whole


def test_chunk_boundary_sweep(backend):
    addr = b"boundary.case@example.org"
    for at in range(2048 - 40, 2048 + 5):
        img = bytearray(b" " * 5000)
        img[at:at + len(addr)] = addr
        recs = scan_image(io.BytesIO(bytes(img)), SMALL)
        assert found(recs) == [(str(at), "boundary.case@example.org")]


def test_output_sorted_and_dereferences(backend):
    rng = random.Random(3)
    img = _random_image(rng, 20000, 30)
    recs = scan_image(img)
    keys = [r.sort_key() for r in recs]
    assert keys == sorted(keys)
    for r in recs:
        if r.path.base == "" and img[r.path.offset:r.path.offset + 1] != b"\x00":
            chunk = img[r.path.offset:r.path.offset + len(r.address)]
            if chunk.lower() == r.address.encode():
                continue
            # UTF-16 hit: first code unit at the offset
            units = img[r.path.offset:r.path.offset + 2 * len(r.address)]
            assert units.decode("utf-16-le").lower() == r.address


def test_from_path(tmp_path, backend):
    p = tmp_path / "img.bin"
    p.write_bytes(b"-> me@here.net <-")
    assert found(scan_image(str(p))) == [("3", "me@here.net")]


class _Flaky(io.RawIOBase):
    def __init__(self, data, fail_after):
        self.buf = io.BytesIO(data)
        self.reads = 0
        self.fail_after = fail_after

    def readable(self):
        return True

    def read(self, n=-1):
        self.reads += 1
        if self.reads > self.fail_after:
            raise OSError("device gone")
        return self.buf.read(n)


def test_io_error_carries_position():
    with pytest.raises(ScanIOError) as err:
        scan_image(_Flaky(b"x" * 10000, 2), SMALL)
    assert err.value.position == 4096


def test_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(overlap=100)
    with pytest.raises(ValueError):
        ScanConfig(chunk_size=1024, overlap=1024)
    with pytest.raises(ValueError):
        ScanConfig(max_recursion_depth=-1)
