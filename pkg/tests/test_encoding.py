import pytest
from hypothesis import given, strategies as st

from rigging.encoding import (
    NULL,
    HashRef,
    Twist,
    decode_ref,
    decode_twist,
    encode_twist,
    hash_twist,
    read_twist,
)
from rigging.errors import EncodingError

# digests below were computed with `openssl dgst -sha256` over hand-written bytes
NULL_TWIST = "709e80c88487a2411e1ee4dfb9f22a861492d20c4765150c0c794abd70f8147c"
FULL_TWIST = "e4f7470beb5f59a3b2c3eecddf7e2e459e8ba1b091f817c246e992850552bd5a"
LOOSE_TWIST = "7911c2e644a27f1c51e64173d5122ff46272b31e0f1bbbf0f5381484350ade2b"


def ref_of(byte):
    return HashRef(0x01, bytes([byte]) * 32)


def test_null_twist_vector():
    t = Twist()
    assert encode_twist(t) == b"\x00\x00\x00"
    assert hash_twist(t).hex() == NULL_TWIST


def test_full_twist_vector():
    t = Twist(ref_of(0x11), ref_of(0x22), ref_of(0x33))
    assert len(encode_twist(t)) == 99
    assert hash_twist(t).hex() == FULL_TWIST
    assert t.is_fast and not t.is_loose


def test_loose_twist_vector():
    t = Twist(ref_of(0x11), NULL, ref_of(0x33))
    assert hash_twist(t).hex() == LOOSE_TWIST
    assert t.is_loose


def test_ref_property_is_hash():
    t = Twist(ref_of(1), NULL, NULL)
    assert t.ref == hash_twist(t)


def test_from_hex_forms():
    r = ref_of(0xAB)
    assert HashRef.from_hex(r.hex()) == r
    assert HashRef.from_hex(r.encode().hex()) == r
    assert HashRef.from_hex("00") == NULL
    with pytest.raises(EncodingError):
        HashRef.from_hex("xyz")
    with pytest.raises(EncodingError):
        HashRef.from_hex("01" + "00" * 30)


@pytest.mark.parametrize(
    "raw",
    [b"", b"\x00\x00", b"\x02" + bytes(34), b"\x01" + bytes(10), b"\x00\x00\x00\x00"],
)
def test_decode_rejects_noncanonical(raw):
    with pytest.raises(EncodingError):
        decode_twist(raw)


def test_bad_digest_length():
    with pytest.raises(EncodingError):
        HashRef(0x01, b"\x00" * 31)
    with pytest.raises(EncodingError):
        HashRef(0x00, b"\x00")


def test_read_twist_streams():
    a, b = Twist(), Twist(ref_of(1), ref_of(2), NULL)
    data = encode_twist(a) + encode_twist(b)
    t1, pos = read_twist(data, 0)
    t2, end = read_twist(data, pos)
    assert (t1, t2, end) == (a, b, len(data))


def test_decode_ref_offsets():
    r, end = decode_ref(b"\xff" + ref_of(7).encode(), 1)
    assert r == ref_of(7) and end == 34


refs = st.one_of(st.just(NULL), st.binary(min_size=32, max_size=32).map(lambda d: HashRef(1, d)))
twists = st.builds(Twist, refs, refs, refs)


@given(twists)
def test_round_trip(t):
    data = encode_twist(t)
    assert decode_twist(data) == t
    assert encode_twist(decode_twist(data)) == data


@given(twists, twists)
def test_distinct_twists_distinct_encodings(a, b):
    assert (encode_twist(a) == encode_twist(b)) == (a == b)
