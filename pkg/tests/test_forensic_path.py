import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from emailnet.forensic_path import (
    INFINITE,
    ForensicPath,
    MalformedPathError,
    distance,
    parse_forensic_path,
)

P = parse_forensic_path


def test_bare_offset():
    p = P("6653952")
    assert (p.base, p.offset) == ("", 6653952)


def test_gzip_path():
    p = P("1048576-GZIP-512")
    assert (p.base, p.offset) == ("1048576-GZIP", 512)


def test_nested_gzip_path():
    p = P("0-GZIP-0-GZIP-7")
    assert (p.base, p.offset) == ("0-GZIP-0-GZIP", 7)


def test_distances():
    assert distance(P("100"), P("250")) == 150
    assert distance(P("100-GZIP-10"), P("100-GZIP-90")) == 80
    assert distance(P("100-GZIP-10"), P("200-GZIP-10")) is INFINITE


def test_infinite_is_out_of_band():
    assert INFINITE > 2**200
    assert math.isinf(INFINITE)


def test_non_compression_transform_treated_uniformly():
    assert distance(P("500-BASE64-100"), P("500-BASE64-40")) == 60
    assert distance(P("500-BASE64-100"), P("500-GZIP-100")) == INFINITE


@pytest.mark.parametrize(
    "raw",
    ["", "abc", "12-", "-5", "+5", "1--5", "1-GZIP-x", "1.5", "1-GZIP--3", "١٢", str(2**64)],
)
def test_malformed(raw):
    with pytest.raises(MalformedPathError):
        P(raw)


def test_max_offset_accepted():
    assert P(str(2**64 - 1)).offset == 2**64 - 1


def test_child_base():
    assert P("4096").child_base() == "4096-GZIP"
    assert P("4096-GZIP-3").child_base("GZIP") == "4096-GZIP-3-GZIP"


segment = st.one_of(st.integers(0, 2**64 - 1).map(str), st.sampled_from(["GZIP", "BASE64", "ZIP"]))
raw_paths = st.builds(
    lambda parts, off: "-".join(parts + [str(off)]),
    st.lists(segment, max_size=5),
    st.integers(0, 2**64 - 1),
)


@given(raw_paths)
def test_round_trip(raw):
    p = P(raw)
    assert p.raw == raw
    assert P(p.raw) == p
    assert not p.base.endswith("-")


@given(raw_paths, raw_paths)
def test_symmetry_and_identity(a, b):
    pa, pb = P(a), P(b)
    assert distance(pa, pb) == distance(pb, pa)
    assert distance(pa, pa) == 0
    if pa.base != pb.base:
        assert distance(pa, pb) is INFINITE


def test_value_semantics():
    assert ForensicPath("x", 1) == P("x-1")
    assert hash(ForensicPath("x", 1)) == hash(P("x-1"))
